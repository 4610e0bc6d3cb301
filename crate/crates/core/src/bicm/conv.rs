//! Feed-forward convolutional code with periodic puncturing and a
//! min-sum soft-input Viterbi decoder.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Code rates the standard 64-state mother code is punctured to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeRate {
    Half,
    TwoThirds,
    FourFifths,
}

impl CodeRate {
    /// `(numerator, denominator)`.
    pub fn fraction(self) -> (usize, usize) {
        match self {
            CodeRate::Half => (1, 2),
            CodeRate::TwoThirds => (2, 3),
            CodeRate::FourFifths => (4, 5),
        }
    }

    pub fn parse(s: &str) -> Option<CodeRate> {
        match s.trim() {
            "1/2" => Some(CodeRate::Half),
            "2/3" => Some(CodeRate::TwoThirds),
            "4/5" => Some(CodeRate::FourFifths),
            _ => None,
        }
    }
}

/// Kept-bit mask: `rows[s][p]` keeps output stream `s` at period position `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturePattern {
    rows: Vec<Vec<bool>>,
}

impl PuncturePattern {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let period = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || period == 0 || rows.iter().any(|r| r.len() != period) {
            return Err(Error::invalid("puncture pattern must be a non-empty rectangular matrix"));
        }
        if (0..period).any(|p| !rows.iter().any(|r| r[p])) {
            return Err(Error::invalid("puncture pattern must keep at least one bit per period column"));
        }
        Ok(PuncturePattern { rows })
    }

    /// Parses rows such as `["11", "10"]`.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| {
                r.chars()
                    .map(|ch| match ch {
                        '1' => Ok(true),
                        '0' => Ok(false),
                        _ => Err(Error::invalid("puncture rows may only contain '0' and '1'")),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }

    pub fn unpunctured(streams: usize) -> Self {
        PuncturePattern { rows: vec![vec![true]; streams] }
    }

    #[inline]
    pub fn period(&self) -> usize {
        self.rows[0].len()
    }

    #[inline]
    pub fn streams(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn keeps(&self, stream: usize, step: usize) -> bool {
        self.rows[stream][step % self.period()]
    }

    pub fn kept_per_period(&self) -> usize {
        self.rows.iter().flatten().filter(|&&k| k).count()
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    /// Number of coded bits surviving after `steps` trellis steps.
    pub fn kept_in(&self, steps: usize) -> usize {
        let full = steps / self.period();
        let rem = steps % self.period();
        full * self.kept_per_period() + (0..rem).map(|p| self.rows.iter().filter(|r| r[p]).count()).sum::<usize>()
    }
}

/// Convolutional code: constraint length, generator taps and puncturing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvCodeSpec {
    constraint_length: usize,
    /// Tap masks; bit `K-1` is the current input.
    generators: Vec<u32>,
    puncture: PuncturePattern,
}

impl ConvCodeSpec {
    /// Generators are tap masks, conventionally written in octal
    /// (`0o133`). The most significant of the `K` bits taps the current
    /// input.
    pub fn new(constraint_length: usize, generators: Vec<u32>, puncture: PuncturePattern) -> Result<Self> {
        if !(2..=16).contains(&constraint_length) {
            return Err(Error::invalid("constraint length must be in 2..=16"));
        }
        if generators.len() < 2 {
            return Err(Error::invalid("need at least two generators"));
        }
        let limit = 1u32 << constraint_length;
        if generators.iter().any(|&g| g == 0 || g >= limit) {
            return Err(Error::invalid("generator taps must be nonzero and fit the constraint length"));
        }
        if puncture.streams() != generators.len() {
            return Err(Error::invalid("puncture pattern needs one row per generator"));
        }
        Ok(ConvCodeSpec { constraint_length, generators, puncture })
    }

    /// The 64-state `(133, 171)` mother code punctured to `rate`.
    pub fn standard(rate: CodeRate) -> Self {
        let pattern = match rate {
            CodeRate::Half => PuncturePattern::unpunctured(2),
            CodeRate::TwoThirds => PuncturePattern::from_strs(&["11", "10"]).expect("valid"),
            CodeRate::FourFifths => PuncturePattern::from_strs(&["1111", "1000"]).expect("valid"),
        };
        ConvCodeSpec::new(7, vec![0o133, 0o171], pattern).expect("valid")
    }

    #[inline]
    pub fn constraint_length(&self) -> usize {
        self.constraint_length
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn puncture(&self) -> &PuncturePattern {
        &self.puncture
    }

    #[inline]
    pub fn streams(&self) -> usize {
        self.generators.len()
    }

    #[inline]
    pub fn tail_len(&self) -> usize {
        self.constraint_length - 1
    }

    #[inline]
    fn num_states(&self) -> usize {
        1 << (self.constraint_length - 1)
    }

    /// `(info bits, coded bits)` per puncturing period.
    pub fn rate(&self) -> (usize, usize) {
        (self.puncture.period(), self.puncture.kept_per_period())
    }

    /// Coded length for `info_len` information bits, tail included.
    pub fn coded_len(&self, info_len: usize) -> usize {
        self.puncture.kept_in(info_len + self.tail_len())
    }

    /// Output bits for input `u` from `state` (previous `K-1` inputs, most
    /// recent in the top bit), and the next state.
    #[inline]
    fn step(&self, state: usize, u: usize) -> (usize, u32) {
        let reg = ((u << (self.constraint_length - 1)) | state) as u32;
        let mut out = 0u32;
        for (s, &g) in self.generators.iter().enumerate() {
            out |= ((reg & g).count_ones() & 1) << s;
        }
        (reg as usize >> 1, out)
    }
}

/// Encodes `info_bits`, appends `K-1` zero tail bits and punctures.
/// Output is time-major: all kept stream bits of step 0, then step 1, ….
pub fn conv_encode(spec: &ConvCodeSpec, info_bits: &[u8]) -> Result<Vec<u8>> {
    if info_bits.is_empty() {
        return Err(Error::invalid("conv_encode: empty input"));
    }
    let steps = info_bits.len() + spec.tail_len();
    let mut out = Vec::with_capacity(spec.puncture.kept_in(steps));
    let mut state = 0usize;
    for t in 0..steps {
        let u = info_bits.get(t).map_or(0, |&b| (b & 1) as usize);
        let (next, bits) = spec.step(state, u);
        for s in 0..spec.streams() {
            if spec.puncture.keeps(s, t) {
                out.push(((bits >> s) & 1) as u8);
            }
        }
        state = next;
    }
    Ok(out)
}

/// Expands punctured metric pairs to one pair per mother-code output,
/// inserting the neutral `(0, 0)` at punctured slots.
pub fn depuncture(spec: &ConvCodeSpec, metrics: &[[f64; 2]], steps: usize) -> Result<Vec<[f64; 2]>> {
    if metrics.len() != spec.puncture.kept_in(steps) {
        return Err(Error::invalid("depuncture: metric count does not match trellis length"));
    }
    let mut it = metrics.iter();
    let mut out = Vec::with_capacity(steps * spec.streams());
    for t in 0..steps {
        for s in 0..spec.streams() {
            out.push(if spec.puncture.keeps(s, t) { *it.next().expect("count checked") } else { [0.0, 0.0] });
        }
    }
    Ok(out)
}

/// Trellis length whose punctured output has exactly `coded_len` bits.
fn steps_for(spec: &ConvCodeSpec, coded_len: usize) -> Option<usize> {
    let (period, kept) = (spec.puncture.period(), spec.puncture.kept_per_period());
    let base = coded_len / kept * period;
    (base..=base + period).find(|&t| spec.puncture.kept_in(t) == coded_len)
}

/// Minimum-sum-weight path through the terminated trellis.
///
/// `metrics[k]` holds the branch weights `(Γ(c_k = 0), Γ(c_k = 1))` of
/// punctured coded bit `k`. Equal path metrics keep the lower-indexed
/// predecessor. Returns the information bits without the tail.
pub fn viterbi_decode(spec: &ConvCodeSpec, metrics: &[[f64; 2]]) -> Result<Vec<u8>> {
    let steps = steps_for(spec, metrics.len())
        .filter(|&t| t > spec.tail_len())
        .ok_or_else(|| Error::invalid("viterbi_decode: metric count matches no terminated frame"))?;
    let full = depuncture(spec, metrics, steps)?;
    let n_states = spec.num_states();
    let streams = spec.streams();
    let k1 = spec.constraint_length - 1;

    // Output bits for (predecessor, input) indexed by next state.
    let mut branch_out = vec![[0u32; 2]; n_states];
    for (next, outs) in branch_out.iter_mut().enumerate() {
        let u = next >> (k1 - 1);
        for b in 0..2 {
            let prev = ((next << 1) & (n_states - 1)) | b;
            let (n2, out) = spec.step(prev, u);
            debug_assert_eq!(n2, next);
            outs[b] = out;
        }
    }

    let mut pm = vec![f64::INFINITY; n_states];
    pm[0] = 0.0;
    let mut next_pm = vec![0.0; n_states];
    // decisions[t * n_states + s]: which predecessor bit survived.
    let mut decisions = vec![0u8; steps * n_states];
    for t in 0..steps {
        let w = &full[t * streams..(t + 1) * streams];
        for next in 0..n_states {
            let base = (next << 1) & (n_states - 1);
            let mut best = f64::INFINITY;
            let mut choice = 0u8;
            for b in 0..2 {
                let out = branch_out[next][b];
                let bm: f64 = w.iter().enumerate().map(|(s, pair)| pair[((out >> s) & 1) as usize]).sum();
                let cand = pm[base | b] + bm;
                // `<` keeps b = 0 on ties; the first candidate always wins
                // over the INFINITY sentinel unless it is itself infinite.
                if b == 0 || cand < best {
                    best = cand;
                    choice = b as u8;
                }
            }
            next_pm[next] = best;
            decisions[t * n_states + next] = choice;
        }
        core::mem::swap(&mut pm, &mut next_pm);
    }

    let mut state = 0usize;
    let mut bits = vec![0u8; steps];
    for t in (0..steps).rev() {
        bits[t] = (state >> (k1 - 1)) as u8 & 1;
        let b = decisions[t * n_states + state] as usize;
        state = ((state << 1) & (n_states - 1)) | b;
    }
    bits.truncate(steps - spec.tail_len());
    Ok(bits)
}
