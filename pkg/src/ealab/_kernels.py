"""Jitted inner loops: RNG, samplers, variation primitives, and run kernels.

Everything here is numba-compiled (``cache=True, nogil=True``) and operates on
plain numpy arrays.  The public modules (`variation`, `engine`, `algorithms`)
wrap these functions; the pure-Python step functions in `algorithms` consume
the *same* primitives in the *same* order, so a full run produced by a kernel
is bit-for-bit identical to one produced by stepping in Python (this is
asserted by the test suite).

Randomness is a SplitMix64 counter generator: 64-bit state, one add + three
xor-multiply mixes per output.  The state is carried in a one-element uint64
array so it can be threaded through nopython code and shared with Python
wrappers.

Draw-order contract (kernels and Python steps must agree):

* initial string: one u64 per bit (top bit), in position order
* (1+1) family iteration: [strength draw][partial Fisher-Yates draws]
* GA crossover: one u01 per position where the parents differ, ascending
  position order for greedy / flip-order for the paired GA (positions where
  the parents agree never consume randomness; the offspring distribution is
  unchanged)
* ties among equal-fitness offspring: reservoir rule, one u01 per tie
  candidate in creation order
* greedy replacement on a fitness tie and Sudholt parental selection:
  ``randbelow(2)`` draws
"""

import math

import numpy as np
from numba import njit, uint64

# Objective kind codes shared with `objectives`.
KIND_ONEMAX = 0  # count of positions matching a target string
KIND_LEADING = 1  # longest target-matching prefix in permutation order
KIND_LINEAR = 2  # weighted sum of one-bits (positive weights, optimum all-ones)

# (1+1)-family variant codes shared with `algorithms`.
VARIANT_RLS = 0
VARIANT_PLAIN = 1
VARIANT_RESAMPLE = 2
VARIANT_SHIFT = 3
VARIANT_RLS_OPT = 4

# Greedy GA variant codes.
GREEDY_SUDHOLT = 0
GREEDY_MOD = 1

# counters[] slots returned by run kernels
C_ITERATIONS = 0
C_EQUAL_SEEN = 1  # offspring bit-equal to a designated parent
C_EQUAL_CHARGED = 2  # ... of which charged an evaluation
C_ELITISM_VIOLATIONS = 3
C_PARAM_VIOLATIONS = 4  # e.g. OLLGA lambda outside [1, n]
C_TRAJ_LEN = 5

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


# ---------------------------------------------------------------------------
# SplitMix64 primitives
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True, inline="always")
def next_u64(state):
    state[0] += uint64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True, nogil=True, inline="always")
def u01(state):
    """Uniform float64 in [0, 1) with 53 random bits."""
    return float(next_u64(state) >> uint64(11)) * _INV_2_53


@njit(cache=True, nogil=True, inline="always")
def randbelow(state, n):
    """Uniform integer in [0, n) via rejection (no modulo bias)."""
    bound = uint64(n)
    threshold = (uint64(0) - bound) % bound
    while True:
        r = next_u64(state)
        if r >= threshold:
            return np.int64(r % bound)


@njit(cache=True, nogil=True)
def random_bits(state, out):
    for i in range(out.shape[0]):
        out[i] = np.uint8(next_u64(state) >> uint64(63))


# ---------------------------------------------------------------------------
# Exact binomial samplers
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _binomial_small(state, n, pp):
    # Inverse-CDF walk from k = 0; requires pp <= 0.5 and n*pp modest so
    # (1-pp)^n stays representable.
    q = 1.0 - pp
    pmf = math.exp(n * math.log1p(-pp))
    u = u01(state)
    k = 0
    cdf = pmf
    while u > cdf and k < n:
        k += 1
        pmf *= (n - k + 1) * pp / (k * q)
        cdf += pmf
    return k


@njit(cache=True, nogil=True)
def _binomial_mode(state, n, pp):
    # Inverse-CDF over the fixed enumeration m, m+1, m-1, m+2, m-2, ...
    # pmf(m) >= 1/(n+1) so nothing underflows regardless of n.
    m = int((n + 1) * pp)
    if m > n:
        m = n
    logpmf = (
        math.lgamma(n + 1.0)
        - math.lgamma(m + 1.0)
        - math.lgamma(n - m + 1.0)
        + m * math.log(pp)
        + (n - m) * math.log1p(-pp)
    )
    pm = math.exp(logpmf)
    ratio = pp / (1.0 - pp)
    u = u01(state)
    cum = pm
    lo = m
    hi = m
    pmf_lo = pm
    pmf_hi = pm
    res = m
    while u > cum:
        advanced = False
        if hi < n:
            pmf_hi *= (n - hi) * ratio / (hi + 1)
            hi += 1
            cum += pmf_hi
            res = hi
            advanced = True
            if u <= cum:
                break
        if lo > 0:
            pmf_lo *= lo / ((n - lo + 1) * ratio)
            lo -= 1
            cum += pmf_lo
            res = lo
            advanced = True
        if not advanced:
            # float tail leakage: u landed beyond the accumulated total
            res = m
            break
    return res


@njit(cache=True, nogil=True)
def binomial(state, n, p):
    """Exact Binomial(n, p) draw."""
    if n <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return np.int64(n)
    flip = p > 0.5
    pp = 1.0 - p if flip else p
    if n * pp < 30.0:
        k = _binomial_small(state, n, pp)
    else:
        k = _binomial_mode(state, n, pp)
    return np.int64(n - k) if flip else np.int64(k)


@njit(cache=True, nogil=True)
def binomial_positive(state, n, p):
    """Exact draw from Binomial(n, p) conditioned on a positive outcome.

    Inverse-CDF walk over k = 1..n with the mass renormalized by
    1/(1-(1-p)^n).  When (1-p)^n is negligible (< 1e-12, equivalently
    n*p > ~27) the conditioning is enforced by resampling the plain
    binomial, which then retries with probability < 1e-12.
    """
    if p >= 1.0:
        return np.int64(n)
    if p > 0.5:
        # zero outcomes are practically impossible; resampling is exact
        while True:
            k = binomial(state, n, p)
            if k > 0:
                return k
    q0 = math.exp(n * math.log1p(-p))
    if q0 < 1e-12:
        while True:
            k = binomial(state, n, p)
            if k > 0:
                return k
    norm = -math.expm1(n * math.log1p(-p))  # 1 - (1-p)^n, no cancellation
    q = 1.0 - p
    pmf = n * p * math.exp((n - 1) * math.log1p(-p))  # P[X = 1]
    u = u01(state)
    k = 1
    cdf = pmf / norm
    while u > cdf and k < n:
        k += 1
        pmf *= (n - k + 1) * p / (k * q)
        cdf += pmf / norm
    return np.int64(k)


@njit(cache=True, nogil=True)
def binomial_batch(state, n, p, out):
    for i in range(out.shape[0]):
        out[i] = binomial(state, n, p)


@njit(cache=True, nogil=True)
def binomial_positive_batch(state, n, p, out):
    for i in range(out.shape[0]):
        out[i] = binomial_positive(state, n, p)


# ---------------------------------------------------------------------------
# Position sampling and bit-string variation
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def fy_positions(state, n, ell, idx, rbuf, posbuf):
    """Sample ``ell`` distinct positions from [0, n) uniformly at random.

    Partial Fisher-Yates over ``idx`` (which must hold the identity
    permutation); the swaps are undone afterwards so ``idx`` can be reused
    without re-initialization.  Positions land in ``posbuf[:ell]`` in
    selection order.  O(ell) draws and work.
    """
    for j in range(ell):
        r = j + randbelow(state, n - j)
        rbuf[j] = r
        t = idx[j]
        idx[j] = idx[r]
        idx[r] = t
        posbuf[j] = idx[j]
    for j in range(ell - 1, -1, -1):
        r = rbuf[j]
        t = idx[j]
        idx[j] = idx[r]
        idx[r] = t


@njit(cache=True, nogil=True, inline="always")
def toggle(bits, posbuf, ell):
    for j in range(ell):
        p = posbuf[j]
        bits[p] = 1 - bits[p]


@njit(cache=True, nogil=True)
def crossover_into(state, out, a, b, c):
    """Biased crossover: out[i] = b[i] with probability c, else a[i].

    Consumes one u01 draw per position (full per-position semantics; the
    run kernels use the restricted differing-positions form instead).
    """
    for i in range(a.shape[0]):
        if u01(state) < c:
            out[i] = b[i]
        else:
            out[i] = a[i]


# ---------------------------------------------------------------------------
# Objective evaluation
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def eval_full(kind, bits, z, pi, w):
    n = bits.shape[0]
    if kind == KIND_ONEMAX:
        c = 0
        for i in range(n):
            if bits[i] == z[i]:
                c += 1
        return float(c)
    elif kind == KIND_LEADING:
        k = 0
        while k < n and bits[pi[k]] == z[pi[k]]:
            k += 1
        return float(k)
    else:
        s = 0.0
        for i in range(n):
            if bits[i] == 1:
                s += w[i]
        return s


@njit(cache=True, nogil=True)
def level_full(kind, bits, z, pi):
    """Integer profile level: fitness for the {0,1}-counting kinds, the
    count of correctly-set bits for linear objectives."""
    n = bits.shape[0]
    if kind == KIND_LEADING:
        k = 0
        while k < n and bits[pi[k]] == z[pi[k]]:
            k += 1
        return np.int64(k)
    c = 0
    for i in range(n):
        if bits[i] == z[i]:
            c += 1
    return np.int64(c)


@njit(cache=True, nogil=True)
def eval_after_toggle(kind, bits, z, pi, rank, w, fit, lvl, posbuf, ell):
    """(fitness, level) of ``bits`` given that it was just toggled at
    ``posbuf[:ell]`` from a string with known (fit, lvl).  O(ell) except for
    the prefix rescan on leading-match improvements and the full linear sum
    (kept exact; linear fitness must not accumulate float drift)."""
    n = bits.shape[0]
    if kind == KIND_ONEMAX:
        d = 0
        for j in range(ell):
            p = posbuf[j]
            if bits[p] == z[p]:
                d += 1
            else:
                d -= 1
        nl = lvl + d
        return float(nl), np.int64(nl)
    elif kind == KIND_LEADING:
        m = n
        for j in range(ell):
            r = rank[posbuf[j]]
            if r < m:
                m = r
        if m > lvl:
            return float(lvl), np.int64(lvl)
        if m < lvl:
            return float(m), np.int64(m)
        k = lvl
        while k < n and bits[pi[k]] == z[pi[k]]:
            k += 1
        return float(k), np.int64(k)
    else:
        s = 0.0
        for i in range(n):
            if bits[i] == 1:
                s += w[i]
        d = 0
        for j in range(ell):
            p = posbuf[j]
            if bits[p] == z[p]:
                d += 1
            else:
                d -= 1
        return s, np.int64(lvl + d)


@njit(cache=True, nogil=True, inline="always")
def record_levels(first_hit, best_level, new_level, charged):
    for k in range(best_level + 1, new_level + 1):
        first_hit[k] = charged
    return new_level


@njit(cache=True, nogil=True, inline="always")
def arrays_equal(a, b):
    for i in range(a.shape[0]):
        if a[i] != b[i]:
            return False
    return True


# ---------------------------------------------------------------------------
# Run kernels
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def run_one_plus_one(
    state,
    n,
    variant,
    p,
    flip_table,
    kind,
    z,
    pi,
    rank,
    w,
    skip_model,
    budget,
    init_mask,
    first_hit,
    counters,
    traj,
):
    """Single-parent loop: RLS, RLS_opt, and the three (1+1) EA variants.

    Returns (hit, total_evaluations, final_best).  ``traj`` (if non-empty)
    receives the incumbent fitness after initialization and after every
    iteration; counters[C_TRAJ_LEN] reports how many entries were written.
    """
    bits = np.empty(n, np.uint8)
    random_bits(state, bits)
    for i in range(n):
        bits[i] ^= init_mask[i]
    fit = eval_full(kind, bits, z, pi, w)
    lvl = level_full(kind, bits, z, pi)
    charged = np.int64(1)
    best_level = record_levels(first_hit, -1, lvl, charged)
    best_fit = fit
    hit = lvl >= n
    tcap = traj.shape[0]
    tlen = 0
    if tlen < tcap:
        traj[tlen] = fit
        tlen += 1

    idx = np.arange(n)
    rbuf = np.empty(n, np.int64)
    posbuf = np.empty(n, np.int64)

    while (not hit) and charged < budget:
        counters[C_ITERATIONS] += 1
        if variant == VARIANT_RLS:
            ell = np.int64(1)
        elif variant == VARIANT_RLS_OPT:
            ell = flip_table[np.int64(fit)]
        elif variant == VARIANT_PLAIN:
            ell = binomial(state, n, p)
        elif variant == VARIANT_RESAMPLE:
            ell = binomial_positive(state, n, p)
        else:  # shift
            ell = binomial(state, n, p)
            if ell == 0:
                ell = np.int64(1)

        if ell == 0:
            # offspring equals its parent (plain variant only)
            counters[C_EQUAL_SEEN] += 1
            if not skip_model:
                charged += 1
                counters[C_EQUAL_CHARGED] += 1
            # f(y) = f(x) >= f(x): accepted, state unchanged
        else:
            fy_positions(state, n, ell, idx, rbuf, posbuf)
            toggle(bits, posbuf, ell)
            new_fit, new_lvl = eval_after_toggle(
                kind, bits, z, pi, rank, w, fit, lvl, posbuf, ell
            )
            charged += 1
            if new_fit > best_fit:
                best_fit = new_fit
            if new_lvl > best_level:
                best_level = record_levels(first_hit, best_level, new_lvl, charged)
            if new_fit >= fit:
                fit = new_fit
                lvl = new_lvl
                if new_lvl >= n:
                    hit = True
            else:
                toggle(bits, posbuf, ell)  # reject: undo
        if tlen < tcap:
            traj[tlen] = fit
            tlen += 1

    counters[C_TRAJ_LEN] = tlen
    return (np.int64(1) if hit else np.int64(0)), charged, best_fit


@njit(cache=True, nogil=True)
def run_ollga(
    state,
    n,
    mod,
    f_strength,
    init_lambda,
    kind,
    z,
    pi,
    rank,
    w,
    skip_model,
    budget,
    init_mask,
    first_hit,
    counters,
):
    """Paired mutate-then-crossover loop with the self-adjusting offspring
    population size (success: lam /= F, otherwise lam *= F^(1/4), clamped to
    [1, n]).  ``mod`` selects the conditional mutation strength and the
    skip-parent-equal crossover phase with the mutation winner in the final
    selection pool.  Returns (hit, total_evaluations, final_best)."""
    bits = np.empty(n, np.uint8)
    random_bits(state, bits)
    for i in range(n):
        bits[i] ^= init_mask[i]
    fit = eval_full(kind, bits, z, pi, w)
    lvl = level_full(kind, bits, z, pi)
    charged = np.int64(1)
    best_level = record_levels(first_hit, -1, lvl, charged)
    best_fit = fit
    hit = lvl >= n

    lam = init_lambda
    quarter = f_strength ** 0.25

    idx = np.arange(n)
    rbuf = np.empty(n, np.int64)
    posbuf = np.empty(n, np.int64)
    wpos = np.empty(n, np.int64)  # mutation winner's flip positions
    subbuf = np.empty(n, np.int64)  # current crossover offspring's toggles
    ybuf = np.empty(n, np.int64)  # selected y's toggles

    halted = False
    while (not hit) and (not halted) and charged < budget:
        counters[C_ITERATIONS] += 1
        if lam < 1.0 or lam > n:
            counters[C_PARAM_VIOLATIONS] += 1
        lam_int = np.int64(math.floor(lam + 0.5))
        if lam_int < 1:
            lam_int = np.int64(1)
        if lam_int > n:
            lam_int = np.int64(n)
        p = lam / n
        if p > 1.0:
            p = 1.0
        c = 1.0 / lam

        if mod:
            ell = binomial_positive(state, n, p)
        else:
            ell = binomial(state, n, p)

        # --- mutation phase ---
        wfit = -math.inf
        wlvl = np.int64(-1)
        wlen = np.int64(0)
        ties = 0
        for i in range(lam_int):
            if ell == 0:
                # offspring equals the parent (vanilla with strength 0)
                ofit = fit
                olvl = lvl
                counters[C_EQUAL_SEEN] += 1
                if skip_model:
                    pass
                else:
                    if charged >= budget:
                        halted = True
                        break
                    charged += 1
                    counters[C_EQUAL_CHARGED] += 1
                olen = np.int64(0)
            else:
                fy_positions(state, n, ell, idx, rbuf, posbuf)
                if charged >= budget:
                    halted = True
                    break
                toggle(bits, posbuf, ell)
                ofit, olvl = eval_after_toggle(
                    kind, bits, z, pi, rank, w, fit, lvl, posbuf, ell
                )
                toggle(bits, posbuf, ell)
                charged += 1
                olen = ell
                if ofit > best_fit:
                    best_fit = ofit
                if olvl > best_level:
                    best_level = record_levels(first_hit, best_level, olvl, charged)
                if olvl >= n:
                    hit = True
            # reservoir winner (ties uniform over creation order)
            take = False
            if ofit > wfit:
                ties = 1
                take = True
            elif ofit == wfit:
                ties += 1
                if u01(state) * ties < 1.0:
                    take = True
            if take:
                wfit = ofit
                wlvl = olvl
                wlen = olen
                for j in range(olen):
                    wpos[j] = posbuf[j]
            if hit:
                break
        if hit or halted:
            break

        # --- crossover phase ---
        yfit = -math.inf
        ylvl = np.int64(-1)
        ylen = np.int64(0)
        ties = 0
        for i in range(lam_int):
            scount = np.int64(0)
            for j in range(wlen):
                if u01(state) < c:
                    subbuf[scount] = wpos[j]
                    scount += 1
            if scount == 0:
                # offspring equals x
                ofit = fit
                olvl = lvl
                counters[C_EQUAL_SEEN] += 1
                if not skip_model:
                    if charged >= budget:
                        halted = True
                        break
                    charged += 1
                    counters[C_EQUAL_CHARGED] += 1
            elif scount == wlen:
                # offspring equals the mutation winner x'
                ofit = wfit
                olvl = wlvl
                counters[C_EQUAL_SEEN] += 1
                if not skip_model:
                    if charged >= budget:
                        halted = True
                        break
                    charged += 1
                    counters[C_EQUAL_CHARGED] += 1
            else:
                if charged >= budget:
                    halted = True
                    break
                toggle(bits, subbuf, scount)
                ofit, olvl = eval_after_toggle(
                    kind, bits, z, pi, rank, w, fit, lvl, subbuf, scount
                )
                toggle(bits, subbuf, scount)
                charged += 1
                if ofit > best_fit:
                    best_fit = ofit
                if olvl > best_level:
                    best_level = record_levels(first_hit, best_level, olvl, charged)
                if olvl >= n:
                    hit = True
            take = False
            if ofit > yfit:
                ties = 1
                take = True
            elif ofit == yfit:
                ties += 1
                if u01(state) * ties < 1.0:
                    take = True
            if take:
                yfit = ofit
                ylvl = olvl
                ylen = scount
                for j in range(scount):
                    ybuf[j] = subbuf[j]
            if hit:
                break
        if hit or halted:
            break

        if mod:
            # the mutation winner joins the selection pool
            if wfit > yfit:
                yfit = wfit
                ylvl = wlvl
                ylen = wlen
                for j in range(wlen):
                    ybuf[j] = wpos[j]
            elif wfit == yfit:
                ties += 1
                if u01(state) * ties < 1.0:
                    yfit = wfit
                    ylvl = wlvl
                    ylen = wlen
                    for j in range(wlen):
                        ybuf[j] = wpos[j]

        # --- selection and update ---
        if yfit > fit:
            toggle(bits, ybuf, ylen)
            fit = yfit
            lvl = ylvl
            lam = lam / f_strength
            if lam < 1.0:
                lam = 1.0
        elif yfit == fit:
            toggle(bits, ybuf, ylen)
            fit = yfit
            lvl = ylvl
            lam = lam * quarter
            if lam > n:
                lam = float(n)
        else:
            lam = lam * quarter
            if lam > n:
                lam = float(n)

    return (np.int64(1) if hit else np.int64(0)), charged, best_fit


@njit(cache=True, nogil=True)
def run_greedy(
    state,
    n,
    variant,
    p,
    kind,
    z,
    pi,
    rank,
    w,
    skip_model,
    budget,
    init_mask,
    first_hit,
    counters,
):
    """Two-individual steady-state loop with uniform crossover, the
    z-not-in-population diversity gate, and replace-the-worst insertion.
    ``variant`` selects the original parental selection with unconditional
    strength draws (GREEDY_SUDHOLT) or the tied-parents crossover with
    conditional strength on parental copies (GREEDY_MOD).
    Returns (hit, total_evaluations, final_best)."""
    x = np.empty(n, np.uint8)
    y = np.empty(n, np.uint8)
    zbuf = np.empty(n, np.uint8)

    random_bits(state, x)
    for i in range(n):
        x[i] ^= init_mask[i]
    fx = eval_full(kind, x, z, pi, w)
    lx = level_full(kind, x, z, pi)
    charged = np.int64(1)
    best_level = record_levels(first_hit, -1, lx, charged)
    best_fit = fx
    if lx >= n:
        return np.int64(1), charged, best_fit

    random_bits(state, y)
    for i in range(n):
        y[i] ^= init_mask[i]
    if charged >= budget:
        return np.int64(0), charged, best_fit
    fy = eval_full(kind, y, z, pi, w)
    ly = level_full(kind, y, z, pi)
    charged += 1
    if fy > best_fit:
        best_fit = fy
    if ly > best_level:
        best_level = record_levels(first_hit, best_level, ly, charged)
    if ly >= n:
        return np.int64(1), charged, best_fit

    idx = np.arange(n)
    rbuf = np.empty(n, np.int64)
    posbuf = np.empty(n, np.int64)

    hit = False
    while charged < budget:
        counters[C_ITERATIONS] += 1
        prev_best = fx if fx > fy else fy
        if fx < fy:
            tmp = x
            x = y
            y = tmp
            tf = fx
            fx = fy
            fy = tf
            tl = lx
            lx = ly
            ly = tl

        # --- build the crossover output z' in zbuf ---
        parental = True
        if variant == GREEDY_SUDHOLT:
            if fx == fy:
                i1 = randbelow(state, 2)
                i2 = randbelow(state, 2)
                if i1 == i2:
                    src = x if i1 == 0 else y
                    for i in range(n):
                        zbuf[i] = src[i]
                else:
                    p1 = x if i1 == 0 else y
                    p2 = y if i1 == 0 else x
                    took_a = False
                    took_b = False
                    for i in range(n):
                        zbuf[i] = p1[i]
                        if p1[i] != p2[i]:
                            if u01(state) < 0.5:
                                zbuf[i] = p2[i]
                                took_b = True
                            else:
                                took_a = True
                    parental = (not took_b) or (not took_a)
            else:
                for i in range(n):
                    zbuf[i] = x[i]
            ell = binomial(state, n, p)
        else:
            if fx == fy:
                took_a = False
                took_b = False
                for i in range(n):
                    zbuf[i] = x[i]
                    if x[i] != y[i]:
                        if u01(state) < 0.5:
                            zbuf[i] = y[i]
                            took_b = True
                        else:
                            took_a = True
                parental = (not took_b) or (not took_a)
            else:
                for i in range(n):
                    zbuf[i] = x[i]
            if parental:
                ell = binomial_positive(state, n, p)
            else:
                ell = binomial(state, n, p)

        # --- mutate ---
        fy_positions(state, n, ell, idx, rbuf, posbuf)
        toggle(zbuf, posbuf, ell)

        eq_x = arrays_equal(zbuf, x)
        eq_y = arrays_equal(zbuf, y)
        if eq_x or eq_y:
            counters[C_EQUAL_SEEN] += 1
            if not skip_model:
                if charged >= budget:
                    break
                charged += 1
                counters[C_EQUAL_CHARGED] += 1
            # the diversity gate blocks insertion either way
        else:
            if charged >= budget:
                break
            fz = eval_full(kind, zbuf, z, pi, w)
            lz = level_full(kind, zbuf, z, pi)
            charged += 1
            if fz > best_fit:
                best_fit = fz
            if lz > best_level:
                best_level = record_levels(first_hit, best_level, lz, charged)
            if lz >= n:
                hit = True
                break
            if fz >= fy:
                if fy < fx:
                    for i in range(n):
                        y[i] = zbuf[i]
                    fy = fz
                    ly = lz
                else:
                    r = randbelow(state, 2)
                    if r == 0:
                        for i in range(n):
                            x[i] = zbuf[i]
                        fx = fz
                        lx = lz
                    else:
                        for i in range(n):
                            y[i] = zbuf[i]
                        fy = fz
                        ly = lz
        if (fx if fx > fy else fy) < prev_best:
            counters[C_ELITISM_VIOLATIONS] += 1

    return (np.int64(1) if hit else np.int64(0)), charged, best_fit


# ---------------------------------------------------------------------------
# Drift table (argmax of the expected one-step gain per fitness level)
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def drift_table_kernel(n, logfact, best_ell, best_drift):
    """For each level v, the flip count maximizing the expected positive
    OneMax gain; ties resolved toward smaller flip counts."""
    for v in range(n):
        bd = -1.0
        bl = np.int64(1)
        for ell in range(1, n + 1):
            lo = (ell + 1) // 2
            if ell - v > lo:
                lo = ell - v
            hi = ell if ell < n - v else n - v
            s = 0.0
            lden = logfact[n] - logfact[ell] - logfact[n - ell]
            for i in range(lo, hi + 1):
                gain = 2 * i - ell
                if gain <= 0:
                    continue
                lnum = (
                    logfact[n - v]
                    - logfact[i]
                    - logfact[n - v - i]
                    + logfact[v]
                    - logfact[ell - i]
                    - logfact[v - ell + i]
                )
                s += math.exp(lnum - lden) * gain
            if s > bd:
                bd = s
                bl = np.int64(ell)
        best_ell[v] = bl
        best_drift[v] = bd
