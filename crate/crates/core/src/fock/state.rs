use super::lattice::{add, sub, IVec3, Mode};

/// Occupied spin-orbitals in canonical order:
/// `|m_1 < m_2 < … < m_N⟩ = a†_{m_1} a†_{m_2} ⋯ a†_{m_N} |0⟩`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FockState {
    modes: Vec<Mode>,
}

impl FockState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Builds a state from distinct modes; returns `None` on a repeated mode.
    /// The returned sign is the permutation parity relative to canonical order,
    /// so `a†_{m_1}⋯a†_{m_N}|0⟩ = sign · |sorted⟩`.
    pub fn from_modes(modes: &[Mode]) -> Option<(f64, Self)> {
        let mut state = Self::vacuum();
        let mut sign = 1.0;
        for m in modes.iter().rev() {
            let (s, next) = state.create(m)?;
            sign *= s;
            state = next;
        }
        Some((sign, state))
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn contains(&self, m: &Mode) -> bool {
        self.modes.binary_search(m).is_ok()
    }

    pub fn total_momentum(&self) -> IVec3 {
        self.modes.iter().fold([0; 3], |acc, m| add(&acc, &m.n))
    }

    /// `Σσ` (twice the spin projection).
    pub fn two_sz(&self) -> i32 {
        self.modes.iter().map(|m| m.spin.sigma()).sum()
    }

    /// `a_m |self⟩`, sign `(−1)^{#occupied before m}`.
    pub fn annihilate(&self, m: &Mode) -> Option<(f64, Self)> {
        let pos = self.modes.binary_search(m).ok()?;
        let mut modes = self.modes.clone();
        modes.remove(pos);
        Some((parity(pos), Self { modes }))
    }

    /// `a†_m |self⟩`, sign `(−1)^{#occupied before m}`.
    pub fn create(&self, m: &Mode) -> Option<(f64, Self)> {
        let pos = self.modes.binary_search(m).err()?;
        let mut modes = self.modes.clone();
        modes.insert(pos, *m);
        Some((parity(pos), Self { modes }))
    }

    /// Global spin flip `σ → −σ`, re-sorted into canonical order.
    pub fn spin_flipped(&self) -> (f64, Self) {
        let flipped: Vec<Mode> =
            self.modes.iter().map(|m| Mode::new(m.n, m.spin.flipped())).collect();
        Self::from_modes(&flipped).expect("flip keeps modes distinct")
    }
}

fn parity(pos: usize) -> f64 {
    if pos.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `a†_{k,σ} a†_{p,σ'} a_{p+q,σ'} a_{k−q,σ} |state⟩` as `(±1, state')`, or
/// `None` when an annihilated mode is empty or a created mode is occupied.
///
/// `k` and `p` carry the spins `σ` and `σ'` of the two legs.
pub fn apply_pair_operator(state: &FockState, k: Mode, p: Mode, q: IVec3) -> Option<(f64, FockState)> {
    let first = Mode::new(sub(&k.n, &q), k.spin);
    let second = Mode::new(add(&p.n, &q), p.spin);
    let (s1, st) = state.annihilate(&first)?;
    let (s2, st) = st.annihilate(&second)?;
    let (s3, st) = st.create(&p)?;
    let (s4, st) = st.create(&k)?;
    Some((s1 * s2 * s3 * s4, st))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::lattice::Spin;

    fn m(n: IVec3, up: bool) -> Mode {
        Mode::new(n, if up { Spin::Up } else { Spin::Down })
    }

    #[test]
    fn create_and_annihilate_signs() {
        let (s, st) = FockState::from_modes(&[m([0, 0, 0], true), m([1, 0, 0], true)]).unwrap();
        assert_eq!(s, 1.0);
        let (s, _) = FockState::from_modes(&[m([1, 0, 0], true), m([0, 0, 0], true)]).unwrap();
        assert_eq!(s, -1.0);
        assert!(FockState::from_modes(&[m([0, 0, 0], true), m([0, 0, 0], true)]).is_none());

        let (sign, rest) = st.annihilate(&m([1, 0, 0], true)).unwrap();
        assert_eq!(sign, -1.0);
        assert_eq!(rest.modes(), &[m([0, 0, 0], true)]);
        assert!(st.create(&m([0, 0, 0], true)).is_none());
        assert!(st.annihilate(&m([0, 0, 1], true)).is_none());
    }

    #[test]
    fn pair_operator_kills_fewer_than_two_particles() {
        let vac = FockState::vacuum();
        let one = FockState::from_modes(&[m([0, 1, 0], false)]).unwrap().1;
        for kn in [[0, 0, 0], [0, 1, 0], [1, 1, 0]] {
            for pn in [[0, 0, 0], [0, 1, 0], [-1, 0, 1]] {
                for q in [[1, 0, 0], [0, 1, 0], [0, -1, 0], [1, 1, 1]] {
                    for (sk, sp) in [(true, true), (true, false), (false, false)] {
                        assert!(apply_pair_operator(&vac, m(kn, sk), m(pn, sp), q).is_none());
                        assert!(apply_pair_operator(&one, m(kn, sk), m(pn, sp), q).is_none());
                    }
                }
            }
        }
    }

    #[test]
    fn pair_operator_moves_both_particles() {
        let (_, st) = FockState::from_modes(&[m([0, 0, 0], true), m([1, 0, 0], false)]).unwrap();
        // Annihilates (0,0,0)↑ and (1,0,0)↓, creates (0,1,0)↑ and (1,-1,0)↓.
        let q = [0, 1, 0];
        let (sign, out) = apply_pair_operator(&st, m([0, 1, 0], true), m([1, -1, 0], false), q).unwrap();
        assert_eq!(out.total_momentum(), st.total_momentum());
        assert_eq!(out.two_sz(), 0);
        assert!(out.contains(&m([0, 1, 0], true)) && out.contains(&m([1, -1, 0], false)));
        assert!(sign == 1.0 || sign == -1.0);
    }

    #[test]
    fn spin_flip_is_an_involution() {
        let (_, st) = FockState::from_modes(&[m([0, 0, 0], true), m([0, 0, 0], false), m([1, 0, 0], true)]).unwrap();
        let (s1, f) = st.spin_flipped();
        let (s2, back) = f.spin_flipped();
        assert_eq!(back, st);
        assert_eq!(s1 * s2, 1.0);
        assert_eq!(f.two_sz(), -st.two_sz());
    }

    /// Word-level oracle: the state is the creator string `a†_{m1}⋯a†_{mN}|0⟩`
    /// kept in insertion order; an annihilator is anticommuted rightwards
    /// until it meets its partner, creators are prepended, and the final
    /// string is bubble-sorted counting transpositions.
    fn word_oracle(occupied: &[Mode], k: Mode, p: Mode, q: IVec3) -> Option<(f64, Vec<Mode>)> {
        let mut word = occupied.to_vec();
        let mut sign = 1.0;
        for target in [Mode::new(sub(&k.n, &q), k.spin), Mode::new(add(&p.n, &q), p.spin)] {
            let pos = word.iter().position(|w| *w == target)?;
            if pos % 2 == 1 {
                sign = -sign;
            }
            word.remove(pos);
        }
        for created in [p, k] {
            if word.contains(&created) {
                return None;
            }
            word.insert(0, created);
        }
        for i in 0..word.len() {
            for j in 0..word.len() - 1 - i {
                if word[j] > word[j + 1] {
                    word.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        Some((sign, word))
    }

    #[test]
    fn pair_operator_matches_word_oracle() {
        let points: Vec<IVec3> = vec![[0, 0, 0], [1, 0, 0], [-1, 0, 0], [0, 1, 0]];
        let mut modes: Vec<Mode> = points.iter().flat_map(|&n| [m(n, false), m(n, true)]).collect();
        modes.sort();
        let transfers: Vec<IVec3> = vec![[1, 0, 0], [-1, 0, 0], [0, 1, 0], [1, -1, 0], [2, 0, 0]];
        let mut hits = 0;
        for a in 0..modes.len() {
            for b in a + 1..modes.len() {
                for c in b + 1..modes.len() {
                    let occ = [modes[a], modes[b], modes[c]];
                    for len in [2, 3] {
                        let st = FockState::from_modes(&occ[..len]).unwrap().1;
                        for &k in &modes {
                            for &p in &modes {
                                for &q in &transfers {
                                    let got = apply_pair_operator(&st, k, p, q);
                                    let want = word_oracle(&occ[..len], k, p, q);
                                    match (got, want) {
                                        (None, None) => {}
                                        (Some((s1, out)), Some((s2, word))) => {
                                            assert_eq!(out.modes(), &word[..]);
                                            assert_eq!(s1, s2);
                                            hits += 1;
                                        }
                                        other => panic!("mismatch {other:?}"),
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(hits > 200, "{hits}");
    }
}
