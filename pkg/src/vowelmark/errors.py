"""Exception types shared across the package."""


class VowelmarkError(Exception):
    """Base class for all package errors."""


# --- audio / manifest loading ---

class CorruptHeader(VowelmarkError):
    pass


class UnsupportedChannels(VowelmarkError):
    pass


class UnsupportedEncoding(VowelmarkError):
    pass


class DuplicateInstance(VowelmarkError):
    pass


class MissingFile(VowelmarkError):
    pass


class BadEnum(VowelmarkError):
    pass


# --- features ---

class NotAVowel(VowelmarkError):
    pass


class FewerThanThreeResonances(VowelmarkError):
    pass


# --- normalization ---

class TooFewVectors(VowelmarkError):
    pass


class SpeakerTooFewInstances(VowelmarkError):
    pass


class DimensionMismatch(VowelmarkError):
    pass


# --- modelling / evaluation ---

class SingleClassTraining(VowelmarkError):
    pass


class TooFewSpeakers(VowelmarkError):
    pass


class MissingInstances(VowelmarkError):
    pass


class CoverageMismatch(VowelmarkError):
    pass


class SingleClassTruths(VowelmarkError):
    pass


class ZeroVariance(VowelmarkError):
    pass
