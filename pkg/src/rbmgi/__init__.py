"""Graph isomorphism as a penalty-QUBO ground-state search, solved with an
RBM variational annealer and with classical SA / path-integral SQA baselines."""

from .baselines import SaConfig, SqaConfig, run_pimc_sqa, run_sa
from .encoding import MappingCode, NonIsomorphicVerdict, build_code, penalty
from .graphs import Graph, VertexMapping, brute_force_isomorphism, parse_pair, read_pair, verify_mapping
from .rbm import RbmParams, init_params, log_psi
from .trace import Isomorphic, NotFound, NotIsomorphic, RunTrace
from .vmc import VmcConfig, run_rbm_sqa, run_vmc

__all__ = [
    "Graph",
    "VertexMapping",
    "parse_pair",
    "read_pair",
    "verify_mapping",
    "brute_force_isomorphism",
    "MappingCode",
    "NonIsomorphicVerdict",
    "build_code",
    "penalty",
    "RbmParams",
    "init_params",
    "log_psi",
    "VmcConfig",
    "run_vmc",
    "run_rbm_sqa",
    "SaConfig",
    "SqaConfig",
    "run_sa",
    "run_pimc_sqa",
    "Isomorphic",
    "NotFound",
    "NotIsomorphic",
    "RunTrace",
]
