//! The fermionic integral `I(f) = lim_r sum_{k < p^r} (-1)^k f(k)`.
//!
//! Integrands are evaluated in the residue ring `Z/p^M` with `M = N + guard`.
//! The partial sums `S_r = S_{p^r}` are built level by level; each level only
//! adds the new block `p^(r-1) <= k < p^r`.
//!
//! For odd `L`, `S_L(f) = (I(f) + I(f(. + L))) / 2`, so for a polynomial
//! integrand `S_r - I(f) = sum_{j >= 1} c_j p^(j r)` with `c_j` in `Z_p`. The
//! default [`Acceleration::Richardson`] eliminates these terms one level at a
//! time; the division is by the units `1 - p^j`. Raw partial sums are kept
//! and reported either way.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::padic::{ExactRational, PadicContext, PadicNumber, Prime, Residue, ResidueRing};

const CHUNK: u64 = 1 << 14;

/// A function on the sample points `k = 0, 1, 2, ...` of `Z_p`, valued in a
/// fixed residue ring.
pub trait Integrand: Sync {
    fn ring(&self) -> &ResidueRing;
    fn eval(&self, k: u64) -> Result<Residue>;
}

/// Polynomial `sum c_n t^n` with coefficients in `Z/p^M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialIntegrand {
    ring: ResidueRing,
    coeffs: Vec<Residue>,
}

impl PolynomialIntegrand {
    pub fn new(ring: ResidueRing, coeffs: Vec<Residue>) -> Self {
        Self { ring, coeffs }
    }

    pub fn from_rationals(ring: ResidueRing, coeffs: &[ExactRational]) -> Result<Self> {
        let coeffs = coeffs
            .iter()
            .map(|c| ring.from_rational(c))
            .collect::<Result<_>>()?;
        Ok(Self { ring, coeffs })
    }

    /// Coefficients must be p-adic integers known to at least `M` digits.
    pub fn from_padic(ring: ResidueRing, coeffs: &[PadicNumber]) -> Result<Self> {
        let coeffs = coeffs
            .iter()
            .map(|c| ring.from_padic(c))
            .collect::<Result<_>>()?;
        Ok(Self { ring, coeffs })
    }

    pub fn constant(ring: ResidueRing, c: Residue) -> Self {
        Self::new(ring, vec![c])
    }

    pub fn monomial(ring: ResidueRing, n: usize) -> Self {
        let mut coeffs = vec![ring.zero(); n + 1];
        coeffs[n] = ring.one();
        Self { ring, coeffs }
    }

    pub fn coeffs(&self) -> &[Residue] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let ring = &self.ring;
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = ring.zero();
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                ring.add(a, b)
            })
            .collect();
        Self::new(ring.clone(), coeffs)
    }

    pub fn scale(&self, c: &Residue) -> Self {
        let coeffs = self.coeffs.iter().map(|x| self.ring.mul(x, c)).collect();
        Self::new(self.ring.clone(), coeffs)
    }

    /// Product with every coefficient above `degree` dropped.
    pub fn mul_truncated(&self, other: &Self, degree: usize) -> Self {
        let ring = &self.ring;
        let len = (self.coeffs.len() + other.coeffs.len())
            .saturating_sub(1)
            .min(degree + 1);
        let mut coeffs = vec![ring.zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] = ring.add(&coeffs[i + j], &ring.mul(a, b));
            }
        }
        Self::new(ring.clone(), coeffs)
    }
}

impl Integrand for PolynomialIntegrand {
    fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    fn eval(&self, k: u64) -> Result<Residue> {
        Ok(self.ring.eval_poly(&self.coeffs, k))
    }
}

/// `q(t)^e` for a polynomial `q` with unit values and an integer `e`.
#[derive(Clone, Debug)]
pub struct PowerIntegrand {
    base: PolynomialIntegrand,
    exponent: i64,
}

impl PowerIntegrand {
    pub fn new(base: PolynomialIntegrand, exponent: i64) -> Self {
        Self { base, exponent }
    }
}

impl Integrand for PowerIntegrand {
    fn ring(&self) -> &ResidueRing {
        &self.base.ring
    }

    fn eval(&self, k: u64) -> Result<Residue> {
        let x = self.base.eval(k)?;
        self.base.ring.pow_signed(&x, self.exponent)
    }
}

/// Adapter for a closure returning p-adic integers known to `M` digits.
pub struct FnIntegrand<F> {
    ring: ResidueRing,
    f: F,
}

impl<F> FnIntegrand<F>
where
    F: Fn(u64) -> Result<PadicNumber> + Sync,
{
    pub fn new(ring: ResidueRing, f: F) -> Self {
        Self { ring, f }
    }
}

impl<F> Integrand for FnIntegrand<F>
where
    F: Fn(u64) -> Result<PadicNumber> + Sync,
{
    fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    fn eval(&self, k: u64) -> Result<Residue> {
        self.ring.from_padic(&(self.f)(k)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Acceleration {
    /// Plain partial sums `S_r`.
    None,
    /// Richardson extrapolation in `p^r` over all computed levels.
    Richardson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegralOptions {
    /// Stop once two successive estimates agree to this many digits.
    pub target_digits: u32,
    pub level_cap: u32,
    pub acceleration: Acceleration,
}

impl IntegralOptions {
    pub fn from_context(ctx: &PadicContext) -> Self {
        Self {
            target_digits: ctx.precision(),
            level_cap: ctx.integral_level_cap(),
            acceleration: Acceleration::Richardson,
        }
    }

    pub fn with_acceleration(mut self, acceleration: Acceleration) -> Self {
        self.acceleration = acceleration;
        self
    }
}

/// `|x_r - x_(r-1)|_p = p^-valuation`; the valuation is capped at the ring
/// precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelDelta {
    pub level: u32,
    pub valuation: u32,
}

impl LevelDelta {
    pub fn norm(&self, prime: Prime) -> ExactRational {
        ExactRational::new(1.into(), prime.power(self.valuation).into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult {
    pub value: PadicNumber,
    /// Largest `r` with `S_{p^r}` computed.
    pub levels_used: u32,
    /// `v_p(S_r - S_(r-1))` for `r = 1..=levels_used`.
    pub level_deltas: Vec<LevelDelta>,
    /// `v_p(E_r - E_(r-1))` for the accelerated estimates `E_r`.
    pub estimate_deltas: Vec<LevelDelta>,
    /// `S_r` for `r = 0..=levels_used`, at the ring precision.
    pub partial_sums: Vec<PadicNumber>,
    pub acceleration: Acceleration,
    pub converged: bool,
}

impl IntegralResult {
    /// [`Error::NotConverged`] unless the stopping rule was met.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged(format!(
                "fermionic sums did not settle within r_max = {}",
                self.levels_used
            )))
        }
    }
}

/// Several integrands sharing the work of each sample point.
pub trait VectorIntegrand: Sync {
    fn ring(&self) -> &ResidueRing;
    fn width(&self) -> usize;
    fn eval(&self, k: u64) -> Result<Vec<Residue>>;
}

struct Single<'a, I: ?Sized>(&'a I);

impl<I: Integrand + ?Sized> VectorIntegrand for Single<'_, I> {
    fn ring(&self) -> &ResidueRing {
        self.0.ring()
    }

    fn width(&self) -> usize {
        1
    }

    fn eval(&self, k: u64) -> Result<Vec<Residue>> {
        Ok(vec![self.0.eval(k)?])
    }
}

/// `sum_{lo <= k < hi} (-1)^k f(k)` per component, chunked over rayon and
/// folded in order.
fn block_sum<V: VectorIntegrand + ?Sized>(f: &V, lo: u64, hi: u64) -> Result<Vec<Residue>> {
    let ring = f.ring();
    let zero = || vec![ring.zero(); f.width()];
    let chunks = (hi - lo).div_ceil(CHUNK);
    let partial = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = lo + c * CHUNK;
            let end = (start + CHUNK).min(hi);
            let mut acc = zero();
            for k in start..end {
                for (a, v) in acc.iter_mut().zip(f.eval(k)?) {
                    *a = if k % 2 == 0 {
                        ring.add(a, &v)
                    } else {
                        ring.sub(a, &v)
                    };
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(partial.iter().fold(zero(), |acc, x| {
        acc.iter().zip(x).map(|(a, b)| ring.add(a, b)).collect()
    }))
}

/// Level-by-level state of one component.
struct Track {
    sum: Residue,
    previous_row: Vec<Residue>,
    estimate: Option<Residue>,
    partial_sums: Vec<PadicNumber>,
    level_deltas: Vec<LevelDelta>,
    estimate_deltas: Vec<LevelDelta>,
    converged: bool,
    levels_used: u32,
}

impl Track {
    fn new(ring: &ResidueRing) -> Self {
        Self {
            sum: ring.zero(),
            previous_row: Vec::new(),
            estimate: None,
            partial_sums: Vec::new(),
            level_deltas: Vec::new(),
            estimate_deltas: Vec::new(),
            converged: false,
            levels_used: 0,
        }
    }

    fn push_level(
        &mut self,
        ring: &ResidueRing,
        r: u32,
        block: &Residue,
        options: &IntegralOptions,
        target: u32,
    ) -> Result<()> {
        let p = ring.prime().get();
        self.sum = ring.add(&self.sum, block);
        if r > 0 {
            self.level_deltas.push(LevelDelta {
                level: r,
                valuation: ring.valuation(block),
            });
        }
        self.partial_sums.push(ring.to_padic(&self.sum));
        let mut row = vec![self.sum.clone()];
        if options.acceleration == Acceleration::Richardson {
            let mut scale = ring.one();
            for j in 1..=r as usize {
                scale = ring.mul(&scale, &ring.from_u64(p));
                let numerator =
                    ring.sub(&row[j - 1], &ring.mul(&scale, &self.previous_row[j - 1]));
                let inv = ring.inverse(&ring.sub(&ring.one(), &scale))?;
                row.push(ring.mul(&numerator, &inv));
            }
        }
        let estimate = row.last().expect("row has an entry").clone();
        self.levels_used = r;
        if let Some(previous) = self.estimate.replace(estimate.clone()) {
            let agreement = ring.valuation(&ring.sub(&estimate, &previous));
            self.estimate_deltas.push(LevelDelta {
                level: r,
                valuation: agreement,
            });
            self.converged = agreement >= target;
        }
        self.previous_row = row;
        Ok(())
    }

    fn finish(self, ring: &ResidueRing, options: &IntegralOptions, target: u32) -> IntegralResult {
        let digits = if self.converged {
            target
        } else {
            self.estimate_deltas
                .last()
                .map_or(0, |d| d.valuation)
                .min(target)
        };
        let estimate = self.estimate.unwrap_or_else(|| self.sum.clone());
        let value = ring.to_padic(&estimate).truncate_absolute(digits as i64);
        log::debug!(
            "fermionic integral: p = {}, levels = {}, converged = {}, digits = {digits}",
            ring.prime(),
            self.levels_used,
            self.converged
        );
        IntegralResult {
            value,
            levels_used: self.levels_used,
            level_deltas: self.level_deltas,
            estimate_deltas: self.estimate_deltas,
            partial_sums: self.partial_sums,
            acceleration: options.acceleration,
            converged: self.converged,
        }
    }
}

/// Fermionic integrals of every component of `f`. Each component stops at
/// its own level; sampling continues while any component is unsettled.
pub fn fermionic_integrals<V: VectorIntegrand + ?Sized>(
    f: &V,
    options: IntegralOptions,
) -> Result<Vec<IntegralResult>> {
    let ring = f.ring();
    let p = ring.prime().get();
    let target = options.target_digits.min(ring.digits());
    let mut tracks: Vec<Track> = (0..f.width()).map(|_| Track::new(ring)).collect();
    let mut upper = 1u64;
    for r in 0..=options.level_cap {
        let lower = if r == 0 { 0 } else { upper };
        if r > 0 {
            upper = upper.checked_mul(p).ok_or_else(|| {
                Error::InvalidContext(format!("p^{r} sample points exceed the index range"))
            })?;
        }
        let blocks = block_sum(f, lower, upper)?;
        for (track, block) in tracks.iter_mut().zip(&blocks) {
            if !track.converged {
                track.push_level(ring, r, block, &options, target)?;
            }
        }
        if tracks.iter().all(|t| t.converged) {
            break;
        }
    }
    Ok(tracks
        .into_iter()
        .map(|t| t.finish(ring, &options, target))
        .collect())
}

/// The fermionic integral of `f` with adaptive choice of the level.
pub fn fermionic_integral<I: Integrand + ?Sized>(
    f: &I,
    options: IntegralOptions,
) -> Result<IntegralResult> {
    let mut results = fermionic_integrals(&Single(f), options)?;
    Ok(results.pop().expect("one component"))
}

/// [`fermionic_integral`] with options taken from the context.
pub fn integrate<I: Integrand + ?Sized>(f: &I, ctx: &PadicContext) -> Result<IntegralResult> {
    fermionic_integral(f, IntegralOptions::from_context(ctx))
}

/// The ring used for integrands under `ctx`: `N + guard` digits.
pub fn working_ring(ctx: &PadicContext) -> ResidueRing {
    ResidueRing::new(ctx.prime(), ctx.working_precision())
}

/// True when every listed delta is at least as small as the one before.
pub fn deltas_nonincreasing(deltas: &[LevelDelta]) -> bool {
    deltas.windows(2).all(|w| w[1].valuation >= w[0].valuation)
}

#[cfg(test)]
mod tests {
    use num_traits::One;
    use proptest::prelude::*;

    use super::*;
    use crate::padic::{factorial, from_int, parse_rational};

    fn ctx(p: u64, n: u32, r_max: u32) -> PadicContext {
        PadicContext::with_budgets(p, n, r_max, 200).unwrap()
    }

    fn q(s: &str) -> ExactRational {
        parse_rational(s).unwrap()
    }

    /// `E_n(0)` from the generating function `2 / (e^z + 1)`, by inverting
    /// the power series `(e^z + 1) / 2`.
    fn euler_at_zero(n: usize) -> ExactRational {
        let g: Vec<ExactRational> = (0..=n)
            .map(|k| {
                if k == 0 {
                    ExactRational::one()
                } else {
                    ExactRational::new(1.into(), factorial(k as u64) * 2)
                }
            })
            .collect();
        let mut h = vec![ExactRational::one()];
        for m in 1..=n {
            let s: ExactRational = (1..=m).map(|k| &g[k] * &h[m - k]).sum();
            h.push(-s);
        }
        &h[n] * ExactRational::from_integer(factorial(n as u64))
    }

    #[test]
    fn euler_oracle_values() {
        assert_eq!(euler_at_zero(0), q("1"));
        assert_eq!(euler_at_zero(1), q("-1/2"));
        assert_eq!(euler_at_zero(2), q("0"));
        assert_eq!(euler_at_zero(3), q("1/4"));
        assert_eq!(euler_at_zero(5), q("-1/2"));
    }

    #[test]
    fn constants_are_exact_at_every_level() {
        for p in [3, 5, 7] {
            let c = ctx(p, 20, 5);
            let ring = working_ring(&c);
            let one = PolynomialIntegrand::constant(ring.clone(), ring.one());
            for acceleration in [Acceleration::None, Acceleration::Richardson] {
                let options = IntegralOptions::from_context(&c).with_acceleration(acceleration);
                let r = fermionic_integral(&one, options).unwrap();
                assert!(r.converged);
                for s in &r.partial_sums {
                    assert_eq!(s, &ring.to_padic(&ring.one()));
                }
                assert!(r.value.agreement(&PadicNumber::one(c.prime(), 20)).unwrap() >= 20);
            }
        }
    }

    #[test]
    fn identity_integrates_to_minus_half() {
        let c = ctx(5, 20, 8);
        let ring = working_ring(&c);
        let t = PolynomialIntegrand::monomial(ring.clone(), 1);
        let r = integrate(&t, &c).unwrap();
        assert!(r.converged);
        let half = PadicNumber::from_rational_at(&q("-1/2"), c.prime(), 20);
        assert!(r.value.agreement(&half).unwrap() >= 20);

        // raw partial sums are (p^r - 1)/2 in closed form
        let raw = fermionic_integral(&t, IntegralOptions::from_context(&c).with_acceleration(Acceleration::None)).unwrap();
        for (level, s) in raw.partial_sums.iter().enumerate() {
            let expected = (crate::padic::prime_power(5, level as i64) - from_int(1)) / from_int(2);
            let expected = PadicNumber::from_rational_at(&expected, c.prime(), 22);
            assert!(s.agreement(&expected).unwrap() >= 22);
        }
        assert!(!raw.converged);
        assert_eq!(raw.value.absolute_precision(), Some(7));
    }

    #[test]
    fn shifted_projection_integrates_to_minus_three_halves() {
        // <1/5 + t> = 1 + 5t for t in Z_5
        let c = ctx(5, 20, 8);
        let ring = working_ring(&c);
        let f = PolynomialIntegrand::from_rationals(ring, &[q("1"), q("5")]).unwrap();
        let r = integrate(&f, &c).unwrap();
        let expected = PadicNumber::from_rational_at(&q("-3/2"), c.prime(), 20);
        assert!(r.value.agreement(&expected).unwrap() >= 20);

        let closure = FnIntegrand::new(working_ring(&c), |k| {
            let a = PadicNumber::from_rational_at(&(q("1/5") + from_int(k as i64)), Prime::new(5).unwrap(), 22);
            crate::projection::angle(&a)
        });
        let r = integrate(&closure, &c).unwrap();
        assert!(r.value.agreement(&expected).unwrap() >= 20);
    }

    #[test]
    fn monomials_match_euler_numbers() {
        for p in [3, 5, 7] {
            let c = ctx(p, 20, 7);
            for n in 0..=8 {
                let f = PolynomialIntegrand::monomial(working_ring(&c), n);
                let r = integrate(&f, &c).unwrap();
                assert!(r.converged, "p = {p}, n = {n}");
                let expected = PadicNumber::from_rational_at(&euler_at_zero(n), c.prime(), 20);
                assert!(r.value.agreement(&expected).unwrap() >= 10, "p = {p}, n = {n}");
            }
        }
    }

    #[test]
    fn raw_deltas_shrink_for_projection_powers() {
        let c = ctx(5, 20, 6);
        let ring = working_ring(&c);
        let base = PolynomialIntegrand::from_rationals(ring, &[q("1"), q("5")]).unwrap();
        for e in [-3, 1, 2, 4] {
            let f = PowerIntegrand::new(base.clone(), e);
            let options = IntegralOptions::from_context(&c).with_acceleration(Acceleration::None);
            let r = fermionic_integral(&f, options).unwrap();
            assert!(deltas_nonincreasing(&r.level_deltas), "e = {e}");
        }
    }

    struct Monomials {
        ring: ResidueRing,
        width: usize,
    }

    impl VectorIntegrand for Monomials {
        fn ring(&self) -> &ResidueRing {
            &self.ring
        }

        fn width(&self) -> usize {
            self.width
        }

        fn eval(&self, k: u64) -> Result<Vec<Residue>> {
            Ok((0..self.width as u64).map(|n| self.ring.pow(&self.ring.from_u64(k), n)).collect())
        }
    }

    #[test]
    fn vector_integrals_match_scalar_ones() {
        let c = ctx(5, 15, 8);
        let ring = working_ring(&c);
        let all = fermionic_integrals(&Monomials { ring: ring.clone(), width: 9 }, IntegralOptions::from_context(&c)).unwrap();
        for (n, joint) in all.iter().enumerate() {
            let single = integrate(&PolynomialIntegrand::monomial(ring.clone(), n), &c).unwrap();
            assert_eq!(joint, &single, "n = {n}");
        }
    }

    #[test]
    fn truncated_products() {
        let ring = ResidueRing::new(Prime::new(5).unwrap(), 10);
        let a = PolynomialIntegrand::from_rationals(ring.clone(), &[q("1"), q("1")]).unwrap();
        let sq = a.mul_truncated(&a, 5);
        assert_eq!(sq, PolynomialIntegrand::from_rationals(ring.clone(), &[q("1"), q("2"), q("1")]).unwrap());
        let cut = a.mul_truncated(&a, 1);
        assert_eq!(cut.degree(), 1);
        assert!(a.add(&a.scale(&ring.from_i64(-1))).coeffs().iter().all(|c| ring.is_zero(c)));
    }

    fn small_poly() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-50i64..50, 1..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn integral_is_linear(
            p in prop_oneof![Just(3u64), Just(5), Just(7)],
            f in small_poly(), g in small_poly(), alpha in -20i64..20, beta in -20i64..20
        ) {
            let c = ctx(p, 12, 5);
            let ring = working_ring(&c);
            let to_poly = |v: &[i64]| PolynomialIntegrand::new(ring.clone(), v.iter().map(|&x| ring.from_i64(x)).collect());
            let (pf, pg) = (to_poly(&f), to_poly(&g));
            let combo = pf.scale(&ring.from_i64(alpha)).add(&pg.scale(&ring.from_i64(beta)));
            let options = IntegralOptions::from_context(&c).with_acceleration(Acceleration::None);
            let (rf, rg, rc) = (
                fermionic_integral(&pf, options).unwrap(),
                fermionic_integral(&pg, options).unwrap(),
                fermionic_integral(&combo, options).unwrap(),
            );
            for level in 0..rc.partial_sums.len().min(rf.partial_sums.len()).min(rg.partial_sums.len()) {
                let lhs = &rc.partial_sums[level];
                let a = PadicNumber::from_integer(alpha, c.prime(), 14);
                let b = PadicNumber::from_integer(beta, c.prime(), 14);
                let rhs = rf.partial_sums[level].mul(&a).unwrap()
                    .add(&rg.partial_sums[level].mul(&b).unwrap()).unwrap();
                prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
            }
        }

        #[test]
        fn acceleration_agrees_with_raw_sums(p in prop_oneof![Just(3u64), Just(5)], f in small_poly()) {
            let c = ctx(p, 10, 8);
            let ring = working_ring(&c);
            let poly = PolynomialIntegrand::new(ring.clone(), f.iter().map(|&x| ring.from_i64(x)).collect());
            let fast = integrate(&poly, &c).unwrap();
            let raw = fermionic_integral(&poly, IntegralOptions::from_context(&c).with_acceleration(Acceleration::None)).unwrap();
            let digits = raw.value.absolute_precision().unwrap();
            prop_assert!(fast.value.agreement(&raw.value).unwrap() >= digits);
        }
    }
}
