"""
mfeeg: multifractal detrended fluctuation analysis of EEG segments and
seizure classification from singularity-spectrum features.

See the [README.md] file for more information.
"""
from .mfeeg import main

if __name__ == '__main__':
    main()
