"""Higher-order nonclassicality witnesses for single-mode intermediate states."""

from .fock import (
    FockState,
    MomentKey,
    central_x_moment_oracle,
    factorial_moment,
    from_amplitudes,
    moment,
    moment_oracle,
    quadrature_mean,
)
from .states import (
    StateSpec,
    closed_form_moment,
    make_binomial,
    make_coherent,
    make_fock,
    make_gbs,
    make_hs,
    make_nbs,
    make_pacs,
)
from .witnesses import (
    WitnessReport,
    find_zero_crossing,
    hoa_d,
    hos_central_moment,
    hos_shm,
    hosps_dh,
    witness_report,
)

__all__ = [
    "FockState", "MomentKey", "StateSpec", "WitnessReport",
    "central_x_moment_oracle", "closed_form_moment", "factorial_moment", "find_zero_crossing",
    "from_amplitudes", "hoa_d", "hos_central_moment", "hos_shm", "hosps_dh",
    "make_binomial", "make_coherent", "make_fock", "make_gbs", "make_hs", "make_nbs", "make_pacs",
    "moment", "moment_oracle", "quadrature_mean", "witness_report",
]
