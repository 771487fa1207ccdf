"""Shipped parameter sets: the S&P estimates for the five table models,
market conditions of reproduction tables 2-6 with their published analytic
(AV) and Monte Carlo (MC) values, and default parameters for the models
without published estimates (Kou, CGMY, Wishart)."""
from __future__ import annotations

from dataclasses import dataclass

from .config import build_model

TABLE_MODELS = ("bs", "heston", "merton", "bates", "fang")
PAYOFFS = ("vanilla", "vol", "tvo")

# parameter blocks keyed by the Table 1 names (sigma_t0 = sqrt(v0) for the
# CIR-driven models)
MODEL_PARAMS = {
    "bs": {"sigma_t0": 0.14},
    "heston": {"sigma_t0": 0.15, "alpha": 4.57, "theta": 0.0306, "eta": 0.48, "rho": -0.82},
    "merton": {"sigma_t0": 0.12, "lambda0": 1.42, "delta": 0.0894, "kappa": -0.075},
    "bates": {"sigma_t0": 0.15, "alpha": 8.93, "theta": 0.0167, "eta": 0.22, "rho": -0.58,
              "lambda0": 0.39, "delta": 0.1049, "kappa": -0.11},
    "fang": {"sigma_t0": 0.14, "alpha": 6.5, "theta": 0.0104, "eta": 0.2, "rho": -0.48,
             "lambda0": 0.41, "delta": 0.2168, "kappa": -0.21,
             "alpha_lambda": 5.06, "theta_lambda": 0.13, "eta_lambda": 1.069},
    # illustrative sets for the models without published estimates
    "kou": {"sigma_t0": 0.1, "lambda0": 1.0, "p": 0.4, "alpha_up": 10.0, "beta_down": 5.0},
    "cgmy": {"c_plus": 1.0, "c_minus": 1.0, "beta_plus": 4.0, "beta_minus": 4.0,
             "alpha_plus": 0.5, "alpha_minus": 0.5},
    "wishart": {"q11": 0.2, "q12": 0.1, "q21": 0.05, "q22": 0.6,
                "m11": -2.0, "m12": 0.3, "m21": 0.2, "m22": -1.5, "c": 3.0,
                "sigma0_11": 0.04, "sigma0_12": 0.01, "sigma0_22": 0.5, "rho": -0.6,
                "delta": 0.1, "kappa": -0.1},
}


def table_models() -> dict:
    """The five estimated parameter sets."""
    return {k: build_model(k, MODEL_PARAMS[k]) for k in TABLE_MODELS}


def default_models() -> dict:
    """All eight models: the table sets plus illustrative Kou, CGMY and
    Wishart parameters."""
    return {k: build_model(k, v) for k, v in MODEL_PARAMS.items()}


@dataclass(frozen=True)
class TableSetup:
    spot: float
    strike: float       # K = H
    vol_strike: float   # Q
    t0: float
    maturity: float
    rate: float
    accrued_tv: float
    target_vol: float = 0.1


TABLES = {
    2: TableSetup(100.0, 80.0, 0.05, 0.0, 1.0, 0.06, 0.0),
    3: TableSetup(100.0, 120.0, 0.1, 0.5, 4.0, 0.039, 0.018),
    4: TableSetup(100.0, 100.0, 0.25, 1.25, 1.5, 0.072, 0.23),
    5: TableSetup(100.0, 60.0, 0.2, 3.0, 5.0, 0.0225, 0.19),
    6: TableSetup(100.0, 130.0, 0.015, 1.0, 2.5, 0.087, 0.009),
}

# published values per (table, model): (vanilla, vol, tvo)
REFERENCE_AV = {
    2: {"bs": (24.7627, 0.0847, 17.5441), "heston": (25.3893, 0.1088, 17.2248),
        "merton": (25.3243, 0.1192, 17.7529), "bates": (25.1166, 0.1002, 18.5980),
        "fang": (25.5686, 0.0907, 24.0494)},
    3: {"bs": (8.4801, 0.1672, 5.7622), "heston": (10.3063, 0.2167, 6.3815),
        "merton": (11.5845, 0.2357, 7.4564), "bates": (9.8607, 0.2002, 6.8180),
        "fang": (8.8630, 0.1827, 7.4173)},
    4: {"bs": (3.7627, 0.2300, 0.9771), "heston": (4.1390, 0.2318, 1.0480),
        "merton": (4.4169, 0.2348, 1.1254), "bates": (4.1842, 0.2327, 1.0593),
        "fang": (4.3219, 0.2362, 1.0919)},
    5: {"bs": (42.6506, 0.2670, 19.7252), "heston": (42.9595, 0.2859, 19.8454),
        "merton": (42.8984, 0.2955, 19.4192), "bates": (42.7768, 0.2804, 19.8042),
        "fang": (43.0039, 0.2793, 20.5992)},
    6: {"bs": (2.3393, 0.1590, 1.9535), "heston": (2.5098, 0.1852, 2.2190),
        "merton": (3.7078, 0.1983, 3.0330), "bates": (2.7416, 0.1767, 2.3727),
        "fang": (1.9814, 0.1664, 1.9453)},
}

REFERENCE_MC = {
    2: {"bs": (24.7775, 0.0848, 17.6982), "heston": (25.3710, 0.1084, 17.6044),
        "merton": (25.2290, 0.1194, 17.7922), "bates": (25.0889, 0.1005, 18.7480),
        "fang": (25.6508, 0.0892, 24.0764)},
    3: {"bs": (8.4784, 0.1695, 5.6957), "heston": (10.3023, 0.2172, 6.7080),
        "merton": (11.5713, 0.2356, 7.4239), "bates": (9.8371, 0.2001, 6.9085),
        "fang": (8.8737, 0.1828, 7.5046)},
    4: {"bs": (3.7346, 0.2305, 0.9437), "heston": (4.1304, 0.2320, 1.0451),
        "merton": (4.4435, 0.2343, 1.1235), "bates": (4.1687, 0.2328, 1.0544),
        "fang": (4.3420, 0.2362, 1.0987)},
    5: {"bs": (42.6452, 0.2665, 19.9181), "heston": (43.0010, 0.2858, 19.6512),
        "merton": (42.8580, 0.2954, 19.3975), "bates": (42.7928, 0.2802, 19.8318),
        "fang": (43.0252, 0.2791, 20.5998)},
    6: {"bs": (2.3080, 0.1588, 1.8622), "heston": (2.5071, 0.1862, 2.1317),
        "merton": (3.6843, 0.1981, 3.0165), "bates": (2.7380, 0.1769, 2.3798),
        "fang": (1.9410, 0.1668, 1.9167)},
}

# relative tolerance of the analytic reproduction per payoff
AV_TOLERANCE = {"vanilla": 0.002, "vol": 0.002, "tvo": 0.01}


def table_mapping(table: int, model: str, payoff: str) -> dict:
    """Flat config mapping for one cell of a reproduction table."""
    if table not in TABLES:
        raise KeyError(f"no table {table}; expected one of {sorted(TABLES)}")
    t = TABLES[table]
    out = {"model": model, **MODEL_PARAMS[model], "spot": t.spot, "accrued_tv": t.accrued_tv,
           "rate": t.rate, "t0": t.t0, "payoff": payoff, "maturity": t.maturity}
    if payoff == "vanilla":
        out["strike"] = t.strike
    elif payoff == "vol":
        out["vol_strike"] = t.vol_strike
    else:
        out.update(strike=t.strike, target_vol=t.target_vol)
    return out
