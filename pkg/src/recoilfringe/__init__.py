"""Coherence loss and revival of fringe contrast from photon recoil in a
three-grating atom interferometer: wave propagation plus closed forms."""

from .distributions import (Delta, DisplacedGaussian, Exponential, GeneralGaussian, HalfGaussian,
                            Mandel, Tabulated, Uniform, VisibilityCurve, VisibilityPhase,
                            analytic_visibility_phase, complex_erf, evaluate_pdf,
                            make_distribution, numeric_visibility_phase, sweep_curve)
from .errors import (ConfigurationError, ContractViolation, CSVParseError, DegenerateScanError,
                     DomainError, NumericError, RecoilFringeError, UnsupportedVariantError)
from .fringe import (FluxScan, FringeResult, Window, ensemble_fringe, fit_fringe, scan_flux,
                     transmitted_flux)
from .geometry import (BeamSpec, Geometry, GratingSpec, Grid, PhotonSpec, derived_quantities,
                       y_prime_for)
from .grating import TransmissionProfile, build_transmission, exit_state, initial_spectrum
from .kernels import IMPLEMENTATION
from .pipeline import PipelineSettings, Simulation
from .propagation import (KickRecord, MomentumSpectrum, TransverseState, apply_grating,
                          apply_kick, envelope_shift_at, far_field_form, pattern_shift,
                          propagate_free)

__version__ = "0.1.0"
