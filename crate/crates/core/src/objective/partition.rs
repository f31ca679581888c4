/// Sign classes of the components of a point: strictly positive, strictly
/// negative and exactly zero. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Partition {
    pub alpha_plus: Vec<usize>,
    pub alpha_minus: Vec<usize>,
    pub beta: Vec<usize>,
}

/// Classifies every component of `x` by sign, comparing against exact `0.0`.
pub fn partition(x: &[f64]) -> Partition {
    let mut p = Partition::default();
    for (i, &v) in x.iter().enumerate() {
        if v > 0.0 {
            p.alpha_plus.push(i);
        } else if v < 0.0 {
            p.alpha_minus.push(i);
        } else {
            p.beta.push(i);
        }
    }
    p
}

impl Partition {
    pub fn len(&self) -> usize {
        self.alpha_plus.len() + self.alpha_minus.len() + self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let p = partition(&[1.0, -2.0, 0.0]);
        assert_eq!(p.alpha_plus, vec![0]);
        assert_eq!(p.alpha_minus, vec![1]);
        assert_eq!(p.beta, vec![2]);

        assert_eq!(partition(&[0.0; 4]).beta, vec![0, 1, 2, 3]);
        assert_eq!(partition(&[0.1, 2.0, 3.0]).alpha_plus, vec![0, 1, 2]);
        // Negative zero is zero.
        assert_eq!(partition(&[-0.0]).beta, vec![0]);
    }

    proptest! {
        #[test]
        fn covers_every_index_once(x in prop::collection::vec(
            prop_oneof![Just(0.0), -10.0..10.0f64], 0..40)) {
            let p = partition(&x);
            prop_assert_eq!(p.len(), x.len());
            let mut all: Vec<usize> = p.alpha_plus.iter()
                .chain(&p.alpha_minus).chain(&p.beta).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..x.len()).collect::<Vec<_>>());
            for &i in &p.alpha_plus { prop_assert!(x[i] > 0.0); }
            for &i in &p.alpha_minus { prop_assert!(x[i] < 0.0); }
            for &i in &p.beta { prop_assert!(x[i] == 0.0); }
        }
    }
}
