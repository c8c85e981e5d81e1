"""Deterministic and randomized set-valued learners.

Every learner is a pure function of the visible history: ``predict(history,
x)`` replays ``history`` from scratch (results are cached per history, which
does not change the output).  Estimators follow the scikit-learn convention:
constructor arguments are hyperparameters, ``fit`` takes the hypothesis class
and sets the trailing-underscore attributes.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from sklearn.base import BaseEstimator

from .core import HypothesisClass, check_trace, full_set, iter_bits
from .dimensions import ALSolver, recursion_headroom
from .exceptions import (HorizonExceeded, InvalidDistribution, InvalidMu, NotFittedError,
                         OutOfRange, UnrealizableHistory)
from .lattice import hull, lattice_closure, pivot_dimension

# comparison slack at the WAA threshold when mu is a float
FLOAT_SLACK = 1e-9


class Learner(BaseEstimator):
    """Base class for deterministic learners over a fitted class."""

    def fit(self, H: HypothesisClass, y=None):
        self.class_ = H
        self._cache = {}
        self._setup(H)
        return self

    def _setup(self, H: HypothesisClass) -> None:
        pass

    def _check_fitted(self) -> HypothesisClass:
        H = getattr(self, "class_", None)
        if H is None:
            raise NotFittedError(f"{type(self).__name__} is not fitted; call fit(H) first")
        return H

    def predict(self, history, x: int) -> int:
        H = self._check_fitted()
        history = check_trace(H, history)
        if not 0 <= x < H.num_instances:
            raise OutOfRange(f"instance {x} out of range")
        return self._predict(history, x)

    def _predict(self, history: tuple, x: int) -> int:
        raise NotImplementedError

    def predict_trace(self, trace) -> list[int]:
        """Predictions made along ``trace``, one per round."""
        trace = check_trace(self._check_fitted(), trace)
        return [self._predict(trace[:k], x) for k, (x, _) in enumerate(trace)]

    def state_key(self, history):
        """What the prediction depends on besides the game state (unfalsified
        set, mistake counts, rounds left).  ``None`` means the whole history."""
        return None

    def __call__(self, history, x: int) -> int:
        return self.predict(history, x)


def _filter(H: HypothesisClass, alive: int, x: int, y: int) -> int:
    out = alive
    for h in iter_bits(alive):
        if not H.value(h, x) >> y & 1:
            out &= ~(1 << h)
    if not out:
        raise UnrealizableHistory(f"no hypothesis allows label {y} at instance {x}")
    return out


class AOALearner(Learner):
    """Horizon-aware minimax learner.

    Predicts the label set minimizing, over the labels the adversary can still
    play, the weighted ambiguous Littlestone dimension of what remains after
    the round.  Ties go to the smallest label-set encoding.
    """

    def __init__(self, horizon: int = 1):
        self.horizon = horizon

    def _setup(self, H):
        if self.horizon < 0:
            raise OutOfRange("horizon must be non-negative")
        self.solver_ = ALSolver(H)

    def choose(self, alive: int, w, x: int, remaining: int) -> tuple[int, int]:
        """``(alpha, value)`` for one round from state ``(alive, w)``."""
        H = self.class_
        parts = H.split(alive, x)
        best_alpha, best = None, None
        for alpha in range(1 << H.num_labels):
            worst = None
            for y, sub in parts.items():
                child = list(w)
                for h in iter_bits(sub):
                    if alpha & ~H.value(h, x) or not alpha >> y & 1:
                        child[h] += 1
                v = self.solver_.value(sub, child, remaining)
                if worst is None or v > worst:
                    worst = v
            if worst is None:
                worst = 0
            if best is None or worst < best:
                best_alpha, best = alpha, worst
        return best_alpha, best

    def replay(self, history) -> tuple[int, tuple[int, ...]]:
        """Unfalsified set and mistake counts after playing ``history``."""
        H = self._check_fitted()
        history = tuple(history)
        hit = self._cache.get(history)
        if hit is not None:
            return hit
        if not history:
            out = (H.all_mask, (0,) * len(H))
        else:
            alive, w = self.replay(history[:-1])
            x, y = history[-1]
            k = len(history) - 1
            alpha, _ = self.choose(alive, w, x, self.horizon - k - 1)
            alive = _filter(H, alive, x, y)
            w = list(w)
            for h in iter_bits(alive):
                if alpha & ~H.value(h, x) or not alpha >> y & 1:
                    w[h] += 1
            out = (alive, tuple(w))
        self._cache[history] = out
        return out

    def weighted_dimension(self, history) -> int:
        """Weighted dimension of the unfalsified set with the rounds left."""
        history = check_trace(self._check_fitted(), history)
        with recursion_headroom(self.horizon):
            alive, w = self.replay(history)
            return self.solver_.value(alive, w, self.horizon - len(history))

    def _predict(self, history, x):
        if len(history) >= self.horizon:
            raise HorizonExceeded(f"history of length {len(history)} at horizon {self.horizon}")
        with recursion_headroom(self.horizon):
            alive, w = self.replay(history)
            return self.choose(alive, w, x, self.horizon - len(history) - 1)[0]

    def state_key(self, history):
        return ()


def to_mu(mu):
    """Exact ``Fraction`` for int/Fraction/str input, ``float`` otherwise."""
    if isinstance(mu, str):
        mu = Fraction(mu)
    if isinstance(mu, bool):
        raise InvalidMu("mu must be a number")
    if isinstance(mu, Rational):
        mu = Fraction(mu)
    elif isinstance(mu, float):
        if not math.isfinite(mu):
            raise InvalidMu("mu must be finite")
    else:
        raise InvalidMu(f"unsupported mu {mu!r}")
    if mu <= 1:
        raise InvalidMu(f"mu must exceed 1, got {mu}")
    return mu


def waa_threshold(pivot_dim: int, mu):
    """Inclusion threshold ``(1 + D(mu-1)) / (mu + D(mu-1))``."""
    return (1 + pivot_dim * (mu - 1)) / (mu + pivot_dim * (mu - 1))


def waa_mistake_bound(num_hypotheses: int, pivot_dim: int, mu, N: int) -> float:
    """Per-hypothesis mistake bound of WAA over ``N`` rounds."""
    mu = float(mu)
    return (math.log(num_hypotheses) + 0.5 * (pivot_dim + 1) ** 2 * (mu - 1) ** 2 * N) / math.log(mu)


def potential_factor(pivot_dim: int, mu, nu):
    """Largest admissible one-round growth of the WAA potential."""
    return max(mu * nu, 1 + pivot_dim * (mu - 1) * (1 - nu))


class WAALearner(Learner):
    """Weighted aggregation over lattice values with a pivot-dimension threshold.

    Weights count underconfidence mistakes of the learner's own past
    predictions, updated for the hypotheses that survive each round.
    """

    def __init__(self, mu=2):
        self.mu = mu

    def _setup(self, H):
        self.mu_ = to_mu(self.mu)
        self.lattice_ = lattice_closure(H)
        self.pivot_dim_ = pivot_dimension(self.lattice_)
        self.nu_ = waa_threshold(self.pivot_dim_, self.mu_)
        self.exact_ = isinstance(self.mu_, Fraction)

    def _power(self, k: int):
        return self.mu_ ** k

    def masses(self, alive: int, w, x: int):
        """``(mass per label, total)``, unnormalized."""
        H = self.class_
        total = 0
        mass = [0] * H.num_labels
        for h in iter_bits(alive):
            p = self._power(w[h])
            total += p
            for y in iter_bits(H.value(h, x)):
                mass[y] += p
        return mass, total

    def choose(self, alive: int, w, x: int) -> int:
        mass, total = self.masses(alive, w, x)
        out = 0
        for y, m in enumerate(mass):
            if self.exact_:
                hit = m >= self.nu_ * total
            else:
                hit = m / total >= self.nu_ - FLOAT_SLACK
            if hit:
                out |= 1 << y
        return out

    def replay(self, history):
        """``(alive, underconfidence counts, full mistake counts)`` after ``history``."""
        H = self._check_fitted()
        history = tuple(history)
        hit = self._cache.get(history)
        if hit is not None:
            return hit
        if not history:
            zero = (0,) * len(H)
            out = (H.all_mask, zero, zero)
        else:
            alive, under, full = self.replay(history[:-1])
            x, y = history[-1]
            alpha = self.choose(alive, under, x)
            alive = _filter(H, alive, x, y)
            under, full = list(under), list(full)
            for h in iter_bits(alive):
                bad_under = bool(alpha & ~H.value(h, x))
                under[h] += bad_under
                full[h] += bad_under or not alpha >> y & 1
            out = (alive, tuple(under), tuple(full))
        self._cache[history] = out
        return out

    def potential(self, history):
        """Sum of ``mu**m`` over unfalsified hypotheses, ``m`` = full mistake count."""
        history = check_trace(self._check_fitted(), history)
        alive, _, full = self.replay(history)
        return sum(self._power(full[h]) for h in iter_bits(alive))

    def potential_factor(self):
        return potential_factor(self.pivot_dim_, self.mu_, self.nu_)

    def check_potential_step(self, history) -> bool:
        """Whether the last round of ``history`` respects the potential bound."""
        history = check_trace(self._check_fitted(), history)
        if not history:
            return True
        before = self.potential(history[:-1])
        after = self.potential(history)
        bound = self.potential_factor() * before
        if self.exact_:
            return after <= bound
        return after <= bound * (1 + FLOAT_SLACK)

    def mistake_bound(self, N: int) -> float:
        return waa_mistake_bound(len(self.class_), self.pivot_dim_, self.mu_, N)

    def _predict(self, history, x):
        alive, under, _ = self.replay(history)
        return self.choose(alive, under, x)

    def state_key(self, history):
        return self.replay(history)[1]


class FullLearner(Learner):
    """Always predicts the whole label set."""

    def _predict(self, history, x):
        return full_set(self.class_.num_labels)

    def state_key(self, history):
        return ()


class HullMemorizer(Learner):
    """Predicts the lattice hull of the labels already seen at ``x``, or the
    whole label set at an unseen instance."""

    def _setup(self, H):
        self.lattice_ = lattice_closure(H)

    def _seen(self, history) -> tuple[int, ...]:
        seen = [0] * self.class_.num_instances
        for x, y in history:
            seen[x] |= 1 << y
        return tuple(seen)

    def _predict(self, history, x):
        seen = self._seen(history)[x]
        if not seen:
            return self.lattice_.full
        return hull(self.lattice_, seen)

    def state_key(self, history):
        return self._seen(history)


def aoa_predict(H: HypothesisClass, N: int, history, x: int) -> int:
    return AOALearner(N).fit(H).predict(history, x)


def waa_predict(H: HypothesisClass, mu, history, x: int) -> int:
    return WAALearner(mu).fit(H).predict(history, x)


def baseline_full(H: HypothesisClass) -> FullLearner:
    return FullLearner().fit(H)


def baseline_hull_memorizer(H: HypothesisClass) -> HullMemorizer:
    return HullMemorizer().fit(H)


LEARNERS = {"aoa": AOALearner, "waa": WAALearner, "full": FullLearner,
            "hull-memo": HullMemorizer}


def make_learner(name: str, H: HypothesisClass, horizon: int | None = None, mu=2) -> Learner:
    if name == "aoa":
        if horizon is None:
            raise OutOfRange("aoa needs a horizon")
        return AOALearner(horizon).fit(H)
    if name == "waa":
        return WAALearner(mu).fit(H)
    if name in LEARNERS:
        return LEARNERS[name]().fit(H)
    raise OutOfRange(f"unknown learner {name!r}; choose from {sorted(LEARNERS)}")


# -- randomized learners --------------------------------------------------------------

def check_distribution(dist, num_labels: int) -> dict[int, Fraction]:
    """Validate an explicit distribution over label sets."""
    if not dist:
        raise InvalidDistribution("empty support")
    full = full_set(num_labels)
    out = {}
    for alpha, p in dist.items():
        if not isinstance(p, Rational):
            raise InvalidDistribution(f"probability {p!r} is not rational")
        p = Fraction(p)
        if alpha < 0 or alpha & ~full:
            raise InvalidDistribution(f"label set {alpha} outside the alphabet")
        if not 0 <= p <= 1:
            raise InvalidDistribution(f"probability {p} outside [0, 1]")
        out[alpha] = p
    if sum(out.values()) != 1:
        raise InvalidDistribution(f"probabilities sum to {sum(out.values())}")
    return out


class RandomizedLearner(BaseEstimator):
    """Base class: ``predict_dist`` returns ``{label set: probability}``."""

    def fit(self, H: HypothesisClass, y=None):
        self.class_ = H
        self._setup(H)
        return self

    def _setup(self, H):
        pass

    def predict_dist(self, history, x: int) -> dict[int, Fraction]:
        H = getattr(self, "class_", None)
        if H is None:
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        history = check_trace(H, history)
        return check_distribution(self._dist(history, x), H.num_labels)

    def _dist(self, history, x):
        raise NotImplementedError


class PointMass(RandomizedLearner):
    """A deterministic learner seen as a randomized one."""

    def __init__(self, learner: Learner | None = None):
        self.learner = learner

    def _setup(self, H):
        if getattr(self.learner, "class_", None) is not H:
            self.learner.fit(H)

    def _dist(self, history, x):
        return {self.learner.predict(history, x): Fraction(1)}


class UniformLearner(RandomizedLearner):
    """Uniform over all label sets."""

    def _dist(self, history, x):
        n = 1 << self.class_.num_labels
        return {alpha: Fraction(1, n) for alpha in range(n)}


class ThresholdMixture(RandomizedLearner):
    """Draws a threshold uniformly from ``thresholds`` and predicts the labels
    whose weighted mass (as in WAA) reaches it."""

    def __init__(self, mu=2, thresholds=(Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))):
        self.mu = mu
        self.thresholds = thresholds

    def _setup(self, H):
        self.base_ = WAALearner(self.mu).fit(H)
        if not self.thresholds:
            raise InvalidDistribution("no thresholds")

    def _dist(self, history, x):
        alive, under, _ = self.base_.replay(history)
        mass, total = self.base_.masses(alive, under, x)
        p = Fraction(1, len(self.thresholds))
        out: dict[int, Fraction] = {}
        for t in self.thresholds:
            alpha = 0
            for y, m in enumerate(mass):
                if Fraction(m) >= Fraction(t) * Fraction(total):
                    alpha |= 1 << y
            out[alpha] = out.get(alpha, 0) + p
        return out
