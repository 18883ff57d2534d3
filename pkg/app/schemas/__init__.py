from app.schemas.geometry import Geometry
from app.schemas.material import DielectricModel, MaterialSpec
from app.schemas.quadrature import QuadratureOverrides, QuadratureSpec, TruncationSpec
from app.schemas.result import ComparisonRecord, Diagnostics, ExpansionResult, KindValues, ResultRecord
from app.schemas.run import OracleOptions, OutputSpec, RunConfig, SweepSpec
