"""Exception and warning types shared across rhythmprint."""


class RhythmprintError(Exception):
    """Base class for all rhythmprint errors."""


class MusicXMLError(RhythmprintError):
    """Raised when a MusicXML document cannot be turned into a score."""


class MalformedXml(MusicXMLError):
    pass


class UnsupportedRoot(MusicXMLError):
    pass


class CompressedMusicXML(MusicXMLError):
    """Compressed ``.mxl`` archives are not read; unzip them first."""


class MissingDivisions(MusicXMLError):
    pass


class NegativeCursor(MusicXMLError):
    pass


class InconsistentParts(MusicXMLError):
    pass


class DiskOutOfRange(RhythmprintError, ValueError):
    pass


class UnsupportedTimeSignature(RhythmprintError):
    """A measure is longer than one traversal of the fingerprint circle."""


class ArcOverflow(RhythmprintError):
    pass


class RankOutOfRange(RhythmprintError, ValueError):
    pass


class PaletteError(RhythmprintError, ValueError):
    pass


class CountMismatch(RhythmprintError):
    pass


class EmptyInput(RhythmprintError, ValueError):
    pass


class ConfigError(RhythmprintError):
    pass


class RhythmWarning(UserWarning):
    """Emitted for lossy decisions: dropped grace notes, snapped tuplets,
    dangling ties and the like. The CLI collects these into its output."""
