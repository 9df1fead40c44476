//! The skew product flow over the odometer with circle fibers.
//!
//! `F(α, z) = (τ(α), σ(α)(z))` where the cocycle `σ` picks the level map
//! indexed by the first schedule block of `α` containing a zero. Direct
//! iteration is the reference path; the `fast_*` operations jump to the
//! block recurrence times `m_k = 2^(n_1+..+n_k)` and their relatives in
//! O(k) closed-form homeomorphism operations regardless of how large `m_k`
//! is, which is what makes the large-time behaviour observable at all
//! (`m_8` is already out of reach of stepping).

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::circle::{apply, compose, invert, power, CircleAngle, CircleHomeo};
use crate::cocycle::CocycleFamily;
use crate::error::{Error, Result};
use crate::odometer::{
    add, block_at, eval_e, first_zero_block, tau, tau_inv, OdometerPoint, Tail,
};

/// Cap on direct stepping; beyond it the closed-form operations are the
/// only viable route.
pub const DIRECT_ITERATION_BUDGET: u64 = 1 << 24;

/// Block scan bound for the cocycle; canonical points other than `1^∞`
/// always settle far earlier.
pub const FIRST_ZERO_SEARCH_LIMIT: usize = 4096;

/// A point of the product space: odometer base plus circle fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPoint {
    pub base: OdometerPoint,
    pub fiber: CircleAngle,
}

impl FlowPoint {
    pub fn new(base: OdometerPoint, fiber: CircleAngle) -> Self {
        FlowPoint { base, fiber }
    }

    pub fn over_zero(fiber: CircleAngle) -> Self {
        FlowPoint::new(OdometerPoint::zero(), fiber)
    }
}

/// The cocycle: `σ(α) = φ_k^(e(α^k))` for the first block `α^k` containing
/// a zero digit, and the identity at `α = 1^∞`.
pub fn sigma(fam: &CocycleFamily, alpha: &OdometerPoint) -> Result<CircleHomeo> {
    match first_zero_block(alpha, fam.schedule(), FIRST_ZERO_SEARCH_LIMIT)? {
        None => Ok(CircleHomeo::Identity),
        Some(k) => {
            let e = eval_e(&block_at(alpha, fam.schedule(), k));
            fam.phi(k, &e)
        }
    }
}

/// One step of the flow: `(α, z) -> (τ(α), σ(α)(z))`.
pub fn step(fam: &CocycleFamily, p: &FlowPoint) -> Result<FlowPoint> {
    let h = sigma(fam, &p.base)?;
    Ok(FlowPoint::new(tau(&p.base), apply(&h, p.fiber)))
}

/// Inverse step: `(β, w) -> (τ⁻¹(β), σ(τ⁻¹(β))⁻¹(w))`.
pub fn step_back(fam: &CocycleFamily, p: &FlowPoint) -> Result<FlowPoint> {
    let prev = tau_inv(&p.base);
    let h = invert(&sigma(fam, &prev)?);
    Ok(FlowPoint::new(prev, apply(&h, p.fiber)))
}

/// `m`-fold direct stepping; the reference implementation every closed-form
/// operation is checked against.
pub fn iterate(fam: &CocycleFamily, p: &FlowPoint, m: u64) -> Result<FlowPoint> {
    if m > DIRECT_ITERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            requested: m.to_string(),
            budget: DIRECT_ITERATION_BUDGET,
        });
    }
    let mut q = p.clone();
    for _ in 0..m {
        q = step(fam, &q)?;
    }
    Ok(q)
}

/// The composed cocycle over the first `m` steps:
/// `σ_m(α) = σ(τ^(m-1) α) ∘ ... ∘ σ(τ α) ∘ σ(α)`, identity at `m = 0`.
pub fn sigma_n(fam: &CocycleFamily, alpha: &OdometerPoint, m: u64) -> Result<CircleHomeo> {
    if m > DIRECT_ITERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            requested: m.to_string(),
            budget: DIRECT_ITERATION_BUDGET,
        });
    }
    let mut acc = CircleHomeo::Identity;
    let mut a = alpha.clone();
    for _ in 0..m {
        acc = compose(&sigma(fam, &a)?, &acc);
        a = tau(&a);
    }
    Ok(acc)
}

/// Net signed power of the level map in `φ_k^(count-1) ∘ ... ∘ φ_k^1 ∘ φ_k^0`:
/// indices in the lower branch contribute `+1`, upper branch `-1`, index 0
/// nothing. Empty composition (`count = 0`) has net power zero, which also
/// covers the `e(α^k) = 0` edge of the closed-form `c_k` formula.
fn net_power(block_len: u32, count: &BigUint) -> BigInt {
    if count.is_zero() {
        return BigInt::zero();
    }
    let top = BigInt::from(count.clone()) - BigInt::one();
    let lower_max = (BigInt::one() << (block_len - 1)) - BigInt::one();
    let plus = top.clone().min(lower_max);
    let minus = (&top - &plus).max(BigInt::zero());
    plus - minus
}

/// The partial level composites `ψ_k^±` of the closed-form iteration
/// formulas, reduced to a single power of the level map.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiDecomposition {
    pub level: u32,
    /// `ψ_k^+`: the composite of `φ_k^j` for `j` below the block value.
    pub plus: CircleHomeo,
    /// `ψ_k^-`: the composite for `j` from the block value upward; the exact
    /// inverse of `plus` because the full level composite cancels.
    pub minus: CircleHomeo,
    /// Net power `c_k` with `plus = φ_k^(c_k)`.
    pub net_power: BigInt,
}

/// Splits level `k` of the cocycle at `e(α^k)` into the mutually inverse
/// partial composites.
pub fn psi_decomposition(
    fam: &CocycleFamily,
    alpha: &OdometerPoint,
    k: u32,
) -> Result<PsiDecomposition> {
    assert!(k >= 1);
    let e = eval_e(&block_at(alpha, fam.schedule(), k));
    let c = net_power(fam.schedule().block_len(k), &e);
    let plus = power(&fam.base_map(k)?, &c)?;
    let minus = invert(&plus);
    Ok(PsiDecomposition {
        level: k,
        plus,
        minus,
        net_power: c,
    })
}

fn check_burst_range(fam: &CocycleFamily, level: u32, s: &BigUint) -> Result<u32> {
    let width = fam.schedule().block_len(level);
    let bound = BigUint::one() << width;
    if s.is_zero() || *s >= bound {
        return Err(Error::SOutOfRange {
            s: s.to_string(),
            level,
            block_width: width,
        });
    }
    Ok(width)
}

/// `F^(s·m_k)(0^∞, z0)` in closed form: the fiber sweeps through
/// `φ_(k+1)^(s-1) ∘ ... ∘ φ_(k+1)^0`, a single net power of the level map,
/// while the base acquires `underline s` in block `k+1`. Valid for
/// `1 <= s < 2^(n_(k+1))`; `k = 0` (`m_0 = 1`) gives the level-1 burst.
pub fn fast_zero_orbit(
    fam: &CocycleFamily,
    z0: CircleAngle,
    k: u32,
    s: &BigUint,
) -> Result<FlowPoint> {
    let width = check_burst_range(fam, k + 1, s)?;
    let time = s * fam.schedule().return_time(k);
    let base = add(&OdometerPoint::zero(), &time);
    let c = net_power(width, s);
    let fiber = apply(&power(&fam.base_map(k + 1)?, &c)?, z0);
    Ok(FlowPoint::new(base, fiber))
}

fn psi_minus_chain(fam: &CocycleFamily, alpha: &OdometerPoint, k: u32) -> Result<CircleHomeo> {
    let mut h = CircleHomeo::Identity;
    for level in 1..=k {
        h = compose(&psi_decomposition(fam, alpha, level)?.minus, &h);
    }
    Ok(h)
}

/// The single map applied at the moment the first `off(k)` digits are all
/// ones: `φ_(k')^(e(α^(k')))` for the first block `k' > k` of `α` containing
/// a zero. When block `k+1` has one this is the textbook middle factor
/// `φ_(k+1)^(e(α^(k+1)))`; an all-ones block `k+1` pushes the map one level
/// deeper (its index would otherwise overflow the family), and a point that
/// is all ones beyond block `k` sits at `1^∞` at that moment, where the
/// cocycle is the identity by fiat.
fn middle_map(fam: &CocycleFamily, alpha: &OdometerPoint, k: u32) -> Result<CircleHomeo> {
    let schedule = fam.schedule();
    for level in k + 1..=k + FIRST_ZERO_SEARCH_LIMIT as u32 {
        if alpha.tail() == &Tail::AllOnes
            && schedule.offset(level - 1) as usize >= alpha.prefix_len()
        {
            return Ok(CircleHomeo::Identity);
        }
        let block = block_at(alpha, schedule, level);
        if block.contains_zero() {
            return fam.phi(level, &eval_e(&block));
        }
    }
    Err(Error::SearchLimitExceeded {
        limit: FIRST_ZERO_SEARCH_LIMIT,
    })
}

/// `F^(m_k - e(α^1..α^k))(α, z0)`: jumps to the time aligning the first
/// `off(k)` base digits to zero. The fiber is
/// `φ_(k+1)^(e(α^(k+1))) ∘ ψ_k^- ∘ ... ∘ ψ_1^-` applied to `z0`; the base is
/// computed by exact big-integer addition, never by splicing blocks.
pub fn fast_align(fam: &CocycleFamily, p: &FlowPoint, k: u32) -> Result<FlowPoint> {
    let schedule = fam.schedule();
    let consumed = p.base.prefix_value(schedule.offset(k) as usize);
    let time = schedule.return_time(k) - consumed;
    let base = add(&p.base, &time);
    let h = compose(&middle_map(fam, &p.base, k)?, &psi_minus_chain(fam, &p.base, k)?);
    Ok(FlowPoint::new(base, apply(&h, p.fiber)))
}

/// `F^(m_k)(α, z0)`: the uniform-rigidity time. The fiber is the sandwich
/// `ψ_1^+ ∘ .. ∘ ψ_k^+ ∘ φ_(k+1)^(e(α^(k+1))) ∘ ψ_k^- ∘ .. ∘ ψ_1^-`, so the
/// cost is O(k) homeomorphism operations however large `m_k` is.
pub fn fast_m_k(fam: &CocycleFamily, p: &FlowPoint, k: u32) -> Result<FlowPoint> {
    let schedule = fam.schedule();
    let base = add(&p.base, &schedule.return_time(k));
    let mut h = compose(&middle_map(fam, &p.base, k)?, &psi_minus_chain(fam, &p.base, k)?);
    for level in (1..=k).rev() {
        h = compose(&psi_decomposition(fam, &p.base, level)?.plus, &h);
    }
    Ok(FlowPoint::new(base, apply(&h, p.fiber)))
}

/// `F^(m_k - e(α^1..α^k) + s·m_j)(α, z0)` for `j < k`: the aligned point
/// followed by a level-`j+1` burst, landing on base block `j+1` equal to
/// `underline s`.
pub fn fast_mixed(
    fam: &CocycleFamily,
    p: &FlowPoint,
    k: u32,
    j: u32,
    s: &BigUint,
) -> Result<FlowPoint> {
    if j >= k {
        return Err(Error::Precondition(format!(
            "fast_mixed requires burst level j < k, got j = {j}, k = {k}"
        )));
    }
    let width = check_burst_range(fam, j + 1, s)?;
    let aligned = fast_align(fam, p, k)?;
    let base = add(&aligned.base, &(s * fam.schedule().return_time(j)));
    let c = net_power(width, s);
    let fiber = apply(&power(&fam.base_map(j + 1)?, &c)?, aligned.fiber);
    Ok(FlowPoint::new(base, fiber))
}
