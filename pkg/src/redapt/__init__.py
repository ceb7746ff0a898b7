"""redapt: requirements-driven runtime adaptation.

The package combines four pieces: an adaptive goal model
(:mod:`redapt.goalmodel`), a temporal-logic specification language with a
three-valued finite-trace evaluator (:mod:`redapt.speclang`), a MAPE
feedback engine (:mod:`redapt.engine`), and a deterministic highway-rail
crossing simulator that the engine adapts (:mod:`redapt.hrcs`).
"""

from importlib import resources

__version__ = "0.1.0"


def data_path(name: str):
    """Filesystem path of a bundled data file (spec or scenario)."""
    return resources.files("redapt.data") / name


def load_bundled_spec():
    """Parse the bundled crossing-control specification document."""
    from .speclang import parse_document

    return parse_document(data_path("hrcs.agmspec").read_text(encoding="utf-8"))
