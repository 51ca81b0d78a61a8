"""vowelmark: sustained-vowel acoustic analysis pipeline.

Segmentation, voice-quality descriptors, functionals, speaker-wise
cross-validated SVM classification, late fusion, and evaluation
statistics, with a synthetic cohort generator for verification.
"""

__version__ = "0.1.0"

from ._smo import BACKEND as SVM_BACKEND

__all__ = ["SVM_BACKEND", "__version__"]
