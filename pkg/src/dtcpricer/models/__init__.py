"""Joint characteristic functions of log-price and total variance."""
from .params import (Bates, BlackScholes, Cgmy, CirParams, ComplexStrip, Fang, Heston, Kou,
                     LeverageNeutralCir, Merton, ModelSpec, WishartDtc, WishartParams,
                     model_name)
from .cir import (cir_exponents, cir_explodes, cir_integrated_laplace, cir_laplace_via_ode,
                  leverage_neutral_cir)
from .wishart import (activity_rate_correlation, hamiltonian, wishart_joint_laplace,
                      wishart_riccati)
from .charfn import STATE_NAMES, cf, cf_with_loading, diffusion_argument, strip_of_analyticity

__all__ = [
    "Bates", "BlackScholes", "Cgmy", "CirParams", "ComplexStrip", "Fang", "Heston", "Kou",
    "LeverageNeutralCir", "Merton", "ModelSpec", "WishartDtc", "WishartParams", "model_name",
    "cir_exponents", "cir_explodes", "cir_integrated_laplace", "cir_laplace_via_ode",
    "leverage_neutral_cir", "activity_rate_correlation", "hamiltonian",
    "wishart_joint_laplace", "wishart_riccati", "STATE_NAMES", "cf", "cf_with_loading",
    "diffusion_argument", "strip_of_analyticity",
]
