from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace


@dataclass(frozen=True)
class SeasonalitySpec:
    name: str
    period_days: float
    fourier_order: int

    def __post_init__(self):
        if not self.period_days > 0:
            raise ValueError(f"seasonality {self.name!r}: period_days must be > 0")
        if int(self.fourier_order) != self.fourier_order or self.fourier_order < 1:
            raise ValueError(f"seasonality {self.name!r}: fourier_order must be an integer >= 1")


WEEKLY = SeasonalitySpec("weekly", 7.0, 3)
YEARLY = SeasonalitySpec("yearly", 365.25, 10)


@dataclass(frozen=True)
class ModelConfig:
    """Hyperparameters for the additive trend + seasonality model.

    Penalties apply to the standardized response: ``trend_penalty`` scales
    the squared changepoint slope adjustments, ``seasonal_penalty`` the
    squared Fourier coefficients.  The base slope and offset are unpenalized.
    """

    n_changepoints: int = 25
    changepoint_range: float = 0.8
    seasonalities: tuple[SeasonalitySpec, ...] = field(default=(WEEKLY, YEARLY))
    trend_penalty: float = 1.0
    seasonal_penalty: float = 0.01
    interval_width: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "seasonalities", tuple(self.seasonalities))
        if self.n_changepoints < 0:
            raise ValueError("n_changepoints must be >= 0")
        if not 0 < self.changepoint_range <= 1:
            raise ValueError("changepoint_range must lie in (0, 1]")
        if self.trend_penalty < 0 or self.seasonal_penalty < 0:
            raise ValueError("penalties must be non-negative")
        if not 0 < self.interval_width < 1:
            raise ValueError("interval_width must lie in (0, 1)")
        names = [s.name for s in self.seasonalities]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate seasonality names: {names}")

    def with_orders(self, weekly: int | None = None, yearly: int | None = None) -> "ModelConfig":
        """Override the built-in weekly/yearly Fourier orders; 0 removes one."""
        wanted = {"weekly": weekly, "yearly": yearly}
        seasonalities = []
        for s in self.seasonalities:
            order = wanted.pop(s.name, None)
            if order is None:
                seasonalities.append(s)
            elif order > 0:
                seasonalities.append(replace(s, fourier_order=int(order)))
        defaults = {"weekly": WEEKLY, "yearly": YEARLY}
        for name, order in wanted.items():
            if order:
                seasonalities.append(replace(defaults[name], fourier_order=int(order)))
        return replace(self, seasonalities=tuple(seasonalities))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seasonalities"] = [asdict(s) for s in self.seasonalities]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        d = dict(d)
        d["seasonalities"] = tuple(SeasonalitySpec(**s) for s in d.get("seasonalities", ()))
        return cls(**d)
