from app.models.dielectric import DielectricKind, Polarization
from app.models.quantity import Kind, Method, OutputFormat, Quantity, Route

# This allows: from app.models import DielectricKind, Kind, Method
