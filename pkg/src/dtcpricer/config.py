"""Run configuration: a flat key = value file (Table 1 parameter names used
verbatim) parsed into model, market, contract, quadrature and simulation
settings.

Example::

    model = heston
    sigma_t0 = 0.15
    alpha = 4.57
    theta = 0.0306
    eta = 0.48
    rho = -0.82
    spot = 100
    rate = 0.06
    payoff = vanilla
    strike = 80
    maturity = 1
"""
from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

from .errors import ParameterError
from .levy_core import CgmyJumps, DoubleExpJumps, NormalJumps
from .mc_oracle import McConfig
from .models import (Bates, BlackScholes, Cgmy, CirParams, Fang, Heston, Kou, Merton,
                     WishartDtc, WishartParams)
from .payoffs import TvoCall, VanillaCall, VolatilityCall
from .pricer import MarketState, QuadConfig

_CIR = ("sigma_t0", "alpha", "theta", "eta", "rho")
_JUMP = ("lambda0", "delta", "kappa")

MODEL_KEYS = {
    "bs": ("sigma_t0",),
    "heston": _CIR,
    "merton": ("sigma_t0",) + _JUMP,
    "bates": _CIR + _JUMP,
    "fang": _CIR + _JUMP + ("alpha_lambda", "theta_lambda", "eta_lambda"),
    "kou": ("sigma_t0", "lambda0", "p", "alpha_up", "beta_down"),
    "cgmy": ("c_plus", "c_minus", "beta_plus", "beta_minus", "alpha_plus", "alpha_minus"),
    "wishart": ("q11", "q12", "q21", "q22", "m11", "m12", "m21", "m22", "c",
                "sigma0_11", "sigma0_12", "sigma0_22", "rho", "delta", "kappa"),
}

PAYOFF_KEYS = {"vanilla": ("strike",), "vol": ("vol_strike",), "tvo": ("strike", "target_vol")}
MARKET_KEYS = ("spot", "accrued_tv", "rate", "t0")
QUAD_KEYS = tuple(f.name for f in fields(QuadConfig))
MC_KEYS = tuple(f.name for f in fields(McConfig))
OUTPUTS = ("human", "csv", "json")


def build_model(name: str, p: dict):
    """Model from its parameter block; raises ParameterError on violations."""
    if name not in MODEL_KEYS:
        raise ParameterError(f"unknown model {name!r}; expected one of {sorted(MODEL_KEYS)}")
    missing = [k for k in MODEL_KEYS[name] if k not in p]
    if missing:
        raise ParameterError(f"model {name!r} missing parameters: {', '.join(missing)}")
    extra = sorted(set(p) - set(MODEL_KEYS[name]))
    if extra:
        raise ParameterError(f"parameters not used by model {name!r}: {', '.join(extra)}")

    def cir():
        return CirParams(alpha=p["alpha"], theta=p["theta"], eta=p["eta"],
                         v0=p["sigma_t0"] ** 2, rho=p["rho"])

    if name == "bs":
        return BlackScholes(p["sigma_t0"])
    if name == "heston":
        return Heston(cir())
    if name == "merton":
        return Merton(p["sigma_t0"], NormalJumps.from_kappa(p["kappa"], p["delta"], p["lambda0"]))
    if name == "bates":
        return Bates(cir(), NormalJumps.from_kappa(p["kappa"], p["delta"], p["lambda0"]))
    if name == "fang":
        intensity = CirParams(alpha=p["alpha_lambda"], theta=p["theta_lambda"],
                              eta=p["eta_lambda"], v0=p["lambda0"])
        return Fang(cir(), intensity, NormalJumps.from_kappa(p["kappa"], p["delta"]))
    if name == "kou":
        return Kou(p["sigma_t0"], DoubleExpJumps(p["p"], p["alpha_up"], p["beta_down"],
                                                 p["lambda0"]))
    if name == "cgmy":
        return Cgmy(CgmyJumps(*(p[k] for k in MODEL_KEYS["cgmy"])))
    return WishartDtc(WishartParams(
        q=[[p["q11"], p["q12"]], [p["q21"], p["q22"]]],
        m=[[p["m11"], p["m12"]], [p["m21"], p["m22"]]], c=p["c"],
        sigma0=[[p["sigma0_11"], p["sigma0_12"]], [p["sigma0_12"], p["sigma0_22"]]],
        rho=p["rho"], jumps=NormalJumps.from_kappa(p["kappa"], p["delta"])))


def build_contract(payoff: str, p: dict, maturity: float):
    if payoff not in PAYOFF_KEYS:
        raise ParameterError(f"unknown payoff {payoff!r}; expected one of {sorted(PAYOFF_KEYS)}")
    missing = [k for k in PAYOFF_KEYS[payoff] if k not in p]
    if missing:
        raise ParameterError(f"payoff {payoff!r} missing: {', '.join(missing)}")
    if payoff == "vanilla":
        return VanillaCall(p["strike"], maturity)
    if payoff == "vol":
        return VolatilityCall(p["vol_strike"], maturity)
    return TvoCall(p["strike"], p["target_vol"], maturity)


def _number(key, v):
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, float)):
        return v
    try:
        return int(v) if key in ("max_evals", "n_paths", "n_steps", "seed", "threads") else float(v)
    except ValueError:
        raise ParameterError(f"{key}: cannot parse {v!r} as a number") from None


def _bool(key, v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"{key}: expected a boolean, got {v!r}")


@dataclass(frozen=True)
class RunConfig:
    model_name: str
    model_params: tuple            # sorted (key, value) pairs, Table 1 names
    market: MarketState
    payoff: Optional[str] = None
    contract_params: tuple = ()
    maturity: Optional[float] = None
    quad: QuadConfig = field(default_factory=QuadConfig)
    mc: McConfig = field(default_factory=McConfig)
    output: str = "human"

    def __post_init__(self):
        self.model           # validate at parse time
        if self.payoff is not None:
            self.contract
        if self.output not in OUTPUTS:
            raise ParameterError(f"output must be one of {OUTPUTS}")

    @property
    def model(self):
        return build_model(self.model_name, dict(self.model_params))

    @property
    def contract(self):
        if self.payoff is None:
            return None
        if self.maturity is None:
            raise ParameterError("maturity is required with a payoff")
        return build_contract(self.payoff, dict(self.contract_params), self.maturity)

    @classmethod
    def from_mapping(cls, m: dict) -> "RunConfig":
        m = {str(k).strip().lower(): v for k, v in m.items()}
        if "model" not in m:
            raise ParameterError("config needs a 'model' entry")
        name = str(m.pop("model")).strip().lower()
        output = str(m.pop("output", "human")).strip().lower()
        payoff = m.pop("payoff", None)
        payoff = None if payoff is None else str(payoff).strip().lower()
        contract_keys = {"strike", "vol_strike", "target_vol"}
        model_p, contract_p, market_p, quad_p, mc_p = {}, {}, {}, {}, {}
        maturity = None
        for k, v in m.items():
            if v is None:
                continue
            if k == "maturity":
                maturity = float(_number(k, v))
            elif k in contract_keys:
                contract_p[k] = float(_number(k, v))
            elif k in MARKET_KEYS:
                market_p[k] = float(_number(k, v))
            elif k in QUAD_KEYS:
                quad_p[k] = _number(k, v)
            elif k in MC_KEYS:
                mc_p[k] = _bool(k, v) if k == "antithetic" else _number(k, v)
            elif k in MODEL_KEYS.get(name, ()):
                model_p[k] = float(_number(k, v))
            else:
                raise ParameterError(f"unknown config key {k!r}")
        if "spot" not in market_p:
            raise ParameterError("config needs 'spot'")
        if payoff is not None:
            contract_p = {k: v for k, v in contract_p.items() if k in PAYOFF_KEYS.get(payoff, ())}
        return cls(name, tuple(sorted(model_p.items())), MarketState(**market_p), payoff,
                   tuple(sorted(contract_p.items())), maturity, QuadConfig(**quad_p),
                   McConfig(**mc_p), output)

    def to_mapping(self) -> dict:
        out = {"model": self.model_name, **dict(self.model_params), **asdict(self.market)}
        if self.payoff is not None:
            out["payoff"] = self.payoff
            out.update(dict(self.contract_params))
            out["maturity"] = self.maturity
        out.update({k: v for k, v in asdict(self.quad).items() if v is not None})
        out.update({k: v for k, v in asdict(self.mc).items() if v is not None})
        out["output"] = self.output
        return out

    def replace(self, **kw) -> "RunConfig":
        m = self.to_mapping()
        m.update(kw)
        return RunConfig.from_mapping(m)


def parse_config_text(text: str) -> dict:
    """key = value lines; '#' or ';' starts a comment."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as e:
        raise ParameterError(f"malformed config: {e}") from None
    return dict(cp["run"])


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return RunConfig.from_mapping(parse_config_text(fh.read()))
