import enum


class Kind(str, enum.Enum):
    """Which observable an asymptotic integral evaluates."""
    ENERGY = "energy"
    FORCE = "force"
    GRADIENT = "gradient"


class Quantity(str, enum.Enum):
    ENERGY = "energy"
    FORCE = "force"
    GRADIENT = "gradient"
    ALL = "all"

    def kinds(self):
        if self is Quantity.ALL:
            return [Kind.ENERGY, Kind.FORCE, Kind.GRADIENT]
        return [Kind(self.value)]


class Method(str, enum.Enum):
    PFA = "pfa"
    NTLO = "ntlo"
    PC_SERIES = "pc-series"
    EXACT = "exact"


class Route(str, enum.Enum):
    LIFSHITZ_INTEGRAL = "lifshitz"
    REDUCED_DOUBLE_INTEGRAL = "reduced"


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"
