"""AI-AEFA: artificial electric field search with a chaotic log-sigmoid Coulomb schedule."""

from aiaefa.core import RunConfig, SearchSpace
from aiaefa.engine import RunResult, run
from aiaefa.problems import ProblemSpec, registry_get

__all__ = ["ProblemSpec", "RunConfig", "RunResult", "SearchSpace", "registry_get", "run"]
__version__ = "0.1.0"
