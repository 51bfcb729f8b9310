"""
Selective pi pulses made of a single DC field segment.

A pulse of duration t along a field of magnitude B rotates spin k by
gamma_k B t.  It is selective for a target set S when the targets turn by odd
multiples of pi and every other spin by even multiples; the product formula
below measures how close a duration comes to that.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pandas as pd
from django.conf import settings

from core.utils.workers import map_chunks

from .exceptions import PhysicsError
from .spins import FieldVector

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQ = (3 - math.sqrt(5)) / 2


@dataclass(frozen=True)
class CommensurabilitySolution:
    """Integers with (2 m_target + 1) / (2 m_spectator) close to gamma_target / gamma_spectator."""

    m_target: int
    m_spectator: int
    achieved_ratio_error: float

    @property
    def m_values(self):
        return (self.m_target, self.m_spectator)

    @property
    def ratio(self):
        return Fraction(2 * self.m_target + 1, 2 * self.m_spectator)

    def duration(self, gamma_target, magnitude):
        """Pulse length turning the target by (2 m_target + 1) pi."""
        return (2 * self.m_target + 1) * math.pi / (abs(gamma_target) * magnitude)


@dataclass(frozen=True)
class DesignSolution:
    duration: float
    field: FieldVector
    target_set: tuple
    predicted_fidelity: float

    @property
    def magnitude(self):
        return self.field.magnitude


def _target_mask(system, target_set):
    targets = set(system.indices(target_set))
    return np.array([k in targets for k in range(1, system.n + 1)])


def product_fidelity(system, target_set, magnitude, t):
    """prod_{i in S} |sin(gamma_i B t / 2)| * prod_{j not in S} |cos(gamma_j B t / 2)|.

    `t` may be a scalar or an array of durations.
    """
    if magnitude <= 0:
        raise PhysicsError(f'field magnitude must be positive, got {magnitude}')
    mask = _target_mask(system, target_set)
    durations = np.asarray(t, dtype=float)
    if np.any(durations < 0):
        raise PhysicsError('durations must be non-negative')
    half_angles = np.multiply.outer(durations * magnitude, np.abs(system.gamma)) / 2
    factors = np.where(mask, np.abs(np.sin(half_angles)), np.abs(np.cos(half_angles)))
    result = factors.prod(axis=-1)
    return float(result) if result.ndim == 0 else result


def rational_approx(gamma_target, gamma_spectator, max_m):
    """Best (m_target, m_spectator) with m_spectator <= max_m.

    For each m_spectator the nearest odd numerator is taken; ties go to the
    smaller m_spectator, i.e. the shorter pulse.
    """
    if gamma_target == 0 or gamma_spectator == 0:
        raise PhysicsError('gyromagnetic ratios must be nonzero')
    if max_m < 1:
        raise PhysicsError(f'max_m must be at least 1, got {max_m}')
    ratio = abs(gamma_target / gamma_spectator)
    best = None
    for m_spectator in range(1, max_m + 1):
        odd = 2 * math.floor(ratio * m_spectator) + 1
        error = abs(ratio - odd / (2 * m_spectator))
        if best is None or error < best.achieved_ratio_error:
            best = CommensurabilitySolution((odd - 1) // 2, m_spectator, error)
    return best


def golden_section_maximize(objective, lower, upper, tolerance):
    """Golden-section search for the maximum of a unimodal function on [lower, upper]."""
    dist = upper - lower
    if dist <= tolerance:
        return (lower + upper) / 2
    iterations = int(math.ceil(math.log(tolerance / dist) / math.log(INV_PHI)))
    c = lower + INV_PHI_SQ * dist
    d = lower + INV_PHI * dist
    yc, yd = objective(c), objective(d)
    for _ in range(iterations - 1):
        if yc > yd:
            upper, d, yd = d, c, yc
            dist *= INV_PHI
            c = lower + INV_PHI_SQ * dist
            yc = objective(c)
        else:
            lower, c, yc = c, d, yd
            dist *= INV_PHI
            d = lower + INV_PHI * dist
            yd = objective(d)
    return (lower + d) / 2 if yc > yd else (c + upper) / 2


def default_grid_points(system, magnitude, t_range):
    """Grid with at least ZF_GRID_POINTS_PER_PERIOD points per 2 pi / (gamma_max B)."""
    t_lo, t_hi = t_range
    period = 2 * math.pi / (np.abs(system.gamma).max() * magnitude)
    per_period = settings.ZF_GRID_POINTS_PER_PERIOD
    return max(2, int(math.ceil(per_period * (t_hi - t_lo) / period)) + 1)


def find_pi_duration(system, target_set, magnitude, t_range, grid_points=None):
    """Grid scan of the product fidelity followed by golden-section refinement."""
    t_lo, t_hi = (float(t) for t in t_range)
    if not 0 <= t_lo < t_hi:
        raise PhysicsError(f'empty design range [{t_lo}, {t_hi}]')
    if magnitude <= 0:
        raise PhysicsError(f'field magnitude must be positive, got {magnitude}')
    if grid_points is None:
        grid_points = default_grid_points(system, magnitude, (t_lo, t_hi))
    if grid_points < 2:
        raise PhysicsError(f'grid_points must be at least 2, got {grid_points}')
    targets = system.indices(target_set)

    grid = np.linspace(t_lo, t_hi, grid_points)
    values = map_chunks(lambda chunk: product_fidelity(system, targets, magnitude, chunk), grid)
    # argmax devolve o primeiro máximo, ou seja, o menor t em caso de empate
    best = int(np.argmax(values))

    lower = grid[max(best - 1, 0)]
    upper = grid[min(best + 1, grid_points - 1)]
    refined = golden_section_maximize(
        lambda t: product_fidelity(system, targets, magnitude, t),
        lower, upper, settings.ZF_GOLDEN_TOLERANCE,
    )
    duration = float(grid[best])
    if product_fidelity(system, targets, magnitude, refined) > values[best]:
        duration = float(refined)

    solution = DesignSolution(
        duration=duration,
        field=FieldVector(0.0, 0.0, magnitude),
        target_set=targets,
        predicted_fidelity=product_fidelity(system, targets, magnitude, duration),
    )
    logger.debug(
        'pi pulse on %s: t = %.6e s, F = %.6f (%d grid points)',
        targets, solution.duration, solution.predicted_fidelity, grid_points,
    )
    return solution


@lru_cache(maxsize=256)
def _cached_design(system, targets, magnitude, t_max):
    return find_pi_duration(system, targets, magnitude, (0.0, t_max))


def design_selective_pi(system, target_set, magnitude, t_max=None):
    """Best pi pulse on `target_set` within (0, t_max]; memoized per system."""
    t_max = settings.ZF_PI_SEARCH_MAX if t_max is None else t_max
    return _cached_design(system, system.indices(target_set), float(magnitude), float(t_max))


def sweep_fidelity(system, target_set, magnitude, t_range, points):
    """Product fidelity on an even grid, as a `t_seconds,fidelity` table."""
    t_lo, t_hi = (float(t) for t in t_range)
    if not 0 <= t_lo < t_hi:
        raise PhysicsError(f'empty sweep range [{t_lo}, {t_hi}]')
    if points < 2:
        raise PhysicsError(f'a sweep needs at least 2 points, got {points}')
    targets = system.indices(target_set)
    grid = np.linspace(t_lo, t_hi, points)
    values = map_chunks(lambda chunk: product_fidelity(system, targets, magnitude, chunk), grid)
    return pd.DataFrame({'t_seconds': grid, 'fidelity': values})
