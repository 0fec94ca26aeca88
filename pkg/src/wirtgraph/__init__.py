"""Wirtinger numbers, bridge-position certificates and quandle bounds for spatial graphs."""

from .diagram import Diagram, build_diagram
from .gauss import parse, parse_link_gauss, parse_spatial_gauss, serialize, validate
from .quandle import FiniteQuandle, count_colorings, from_spec
from .wirt import embedding_certificate, is_k_colorable, tangle_report, wirtinger_number

__version__ = "0.1.0"

__all__ = [
    "Diagram",
    "FiniteQuandle",
    "build_diagram",
    "count_colorings",
    "embedding_certificate",
    "from_spec",
    "is_k_colorable",
    "parse",
    "parse_link_gauss",
    "parse_spatial_gauss",
    "serialize",
    "tangle_report",
    "validate",
    "wirtinger_number",
]
