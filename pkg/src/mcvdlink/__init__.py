"""Link-level analysis of diffusive molecular communication.

One tagged transmitter talks to a fully-absorbing spherical receiver through
free diffusion while a Poisson field of interferers sends independent random
bits. The package provides the closed-form channel response, expected-count
and bit-error expressions built on complete Bell polynomials, an independent
Monte Carlo simulator for cross-validation, and a sweep/validation CLI.
"""

from .ber_analytic import (
    AlphaVector,
    BerBreakdown,
    alpha_vector,
    optimal_threshold,
    pe_curves,
    pe_given_0,
    pe_given_1_fixed,
    pe_given_1_nearest,
    pe_total,
)
from .channel import (
    MediumConfig,
    ReceiverConfig,
    cir_fraction,
    cir_fraction_infinite_time,
    half_life_to_rate,
    hitting_rate,
)
from .errors import (
    AccuracyError,
    DivergenceError,
    DomainError,
    McvdLinkError,
    RangeOverflowError,
    UnsupportedModeError,
    UnsupportedSizeError,
)
from .expectations import (
    FixedTagged,
    LinkConfig,
    NearestTagged,
    expected_interference,
    expected_interference_infinite_slot,
    expected_signal,
    expected_total,
)
from .montecarlo import (
    BerEstimate,
    CountEstimate,
    TrialOutcome,
    estimate_expected_counts,
    simulate_fixed,
    simulate_fixed_sweep,
    simulate_nearest,
    simulate_nearest_sweep,
    simulate_trial,
)
from .numerics import (
    BellInput,
    QuadratureSpec,
    bell_normalized,
    bell_partition_reference,
    exp_times_erfc,
    integrate_finite,
    integrate_semi_infinite,
)
from .pointfield import (
    FieldConfig,
    MarkedPoint,
    nearest_distance_cdf,
    nearest_distance_pdf,
    sample_field,
    sample_nearest_distance,
)

__version__ = "0.1.0"
