"""crlab: a numerical laboratory for contact frames, Hamiltonian contact
flows and quasiconformal distortion on the 3-sphere."""

__version__ = "0.1.0"

from .sphere import (AmbientVector, FramePacket, SpherePoint, clifford_point,
                     frame_at, normalize, orientation_check)
from .polyfields import (PolyVectorField, R_FIELD, X_FIELD, Y_FIELD, Z_FIELD,
                         ZB_FIELD, lie_bracket)
from .jets import Jet3, fd_jet
from .fields import (FiniteDifferenceField, PolynomialField,
                     RadialProfileField, ScalarField, frame_derivative,
                     laplacian)
from .structures import (DeformationTensor, InvariantFamilyParams,
                         LambdaProfile, dilatation, invariant_family,
                         lambda_profile, nu_from_lambda,
                         pushforward_consistency)
from .flows import (ContactVectorField, FlowMap, beltrami, contact_defect,
                    equivariance_defect, hamiltonian_field, integrate,
                    max_dilatation)
from .hopf import (BaseCurve, BaseMap, EquivariantLift, IdentityMap,
                   LiftResult, MetricOnS2, RiemannSpherePoint, RoundMetric,
                   StretchedMetric, ZAxisRotation, cap_area, horizontal_lift,
                   lift_base_map, project, quotient_dilatation,
                   structure_equation_residual)
from .variation import (BreakingAudit, BreakingHamiltonian, FirstVariation,
                        HamiltonianFamily, VariationReport, breaking_audit,
                        breaking_hamiltonian, coeff_a, coeff_b,
                        first_variation, hamiltonian_search, second_variation,
                        torus_mean_first_variation)
from .config import RunConfig, load_config
from .report import Report
