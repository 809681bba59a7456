"""The classifiers evaluated on the feature vectors."""

from .base import NEGATIVE, POSITIVE, Classifier, Signature, TrainedModel  # noqa: F401
from .helpers import ZScoreScaler, rbf_kernel, rbf_kernel_matrix          # noqa: F401
from .knn import KNN, KnnModel, predict_knn, train_knn                     # noqa: F401
from .svm import SVM, SvmModel, predict_svm, train_svm                     # noqa: F401

CLASSIFIERS = {
    'svm': SVM,
    'knn': KNN,
}
