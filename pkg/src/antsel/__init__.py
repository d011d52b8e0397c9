"""Sparse receive-antenna selection for single-user massive MIMO uplinks.

The combiner is obtained by minimising the receive MSE under an L0 budget
with orthogonal matching pursuit, over exponentially correlated Rayleigh
channels and a statistically modelled channel-estimation error.
"""

from antsel.channel import (
    ChannelRealization,
    CorrelationModel,
    RngStream,
    apply_correlation,
    build_correlation,
    corrupt_estimate,
    sample_iid_channel,
    sample_noise,
    sample_realization,
)
from antsel.exceptions import AntselError
from antsel.harness import (
    BerRecord,
    SimPoint,
    analytic_mrc_ber,
    measure_omp_runtime,
    run_point,
    run_sweep,
)
from antsel.linalg import cholesky, forward_solve, hermitian_sqrt, ls_solve
from antsel.receiver import (
    bpsk_detect,
    bpsk_modulate,
    combine_mrc,
    combine_selection,
    receive,
)
from antsel.selection import (
    SelectionProblem,
    SelectionVector,
    build_problem,
    exhaustive_select,
    mse_direct,
    mse_factored,
    omp_select,
)

__version__ = "0.1.0"

__all__ = [
    "AntselError",
    "BerRecord",
    "ChannelRealization",
    "CorrelationModel",
    "RngStream",
    "SelectionProblem",
    "SelectionVector",
    "SimPoint",
    "analytic_mrc_ber",
    "apply_correlation",
    "bpsk_detect",
    "bpsk_modulate",
    "build_correlation",
    "build_problem",
    "cholesky",
    "combine_mrc",
    "combine_selection",
    "corrupt_estimate",
    "exhaustive_select",
    "forward_solve",
    "hermitian_sqrt",
    "ls_solve",
    "measure_omp_runtime",
    "mse_direct",
    "mse_factored",
    "omp_select",
    "receive",
    "run_point",
    "run_sweep",
    "sample_iid_channel",
    "sample_noise",
    "sample_realization",
]
