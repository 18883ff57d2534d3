import enum


class DielectricKind(str, enum.Enum):
    VACUUM = "vacuum"
    PERFECT_CONDUCTOR = "pc"
    PLASMA = "plasma"
    DRUDE = "drude"
    CUSTOM = "custom"


class Polarization(str, enum.Enum):
    TE = "te"
    TM = "tm"
