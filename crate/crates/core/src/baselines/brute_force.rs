use rayon::prelude::*;

use crate::arrangement::ContactLabel;
use crate::equilibrium::{solve_labels, Tolerances};
use crate::model::{validate_model, GraspModel, Wrench};
use crate::stability::{StabilityError, Verdict};

/// Largest grasp the exhaustive search accepts.
pub const MAX_BRUTE_FORCE_CONTACTS: usize = 12;

/// Labels each contact may take: detachment only for unloaded contacts.
pub fn contact_alphabet(model: &GraspModel, detachment: bool) -> Vec<Vec<ContactLabel>> {
    use ContactLabel::*;
    (0..model.len())
        .map(|i| {
            if detachment && model.is_unloaded(i) {
                vec![Detached, SlipNeg, Stick, SlipPos]
            } else {
                vec![SlipNeg, Stick, SlipPos]
            }
        })
        .collect()
}

/// Label vector number `k` in lexicographic order over the alphabets.
fn nth_labeling(alphabet: &[Vec<ContactLabel>], mut k: usize) -> Vec<ContactLabel> {
    let mut out = vec![ContactLabel::Stick; alphabet.len()];
    for (slot, letters) in out.iter_mut().zip(alphabet).rev() {
        *slot = letters[k % letters.len()];
        k /= letters.len();
    }
    out
}

/// Tries every labeling, consistent with a rigid motion or not.
pub fn brute_force_verdict(
    model: &GraspModel,
    w: &Wrench,
    detachment: bool,
) -> Result<Verdict, StabilityError> {
    if model.len() > MAX_BRUTE_FORCE_CONTACTS {
        return Err(StabilityError::InvalidParameter("brute force is limited to 12 contacts"));
    }
    validate_model(model)?;
    if !w.is_finite() {
        return Err(StabilityError::NonFiniteWrench);
    }
    let alphabet = contact_alphabet(model, detachment);
    let total: usize = alphabet.iter().map(Vec::len).product();
    let tol = Tolerances::default();
    let found = (0..total)
        .into_par_iter()
        .map(|k| (k, solve_labels(model, w, &nth_labeling(&alphabet, k), &tol)))
        .find_map_first(|(k, r)| match r {
            Ok(Some(sol)) => Some(Ok((k, sol))),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        })
        .transpose()?;
    Ok(match found {
        Some((k, sol)) => Verdict {
            stable: true,
            witness: Some(sol),
            states_tried: k + 1,
            detachment,
        },
        None => Verdict { stable: false, witness: None, states_tried: total, detachment },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    #[test]
    fn labelings_are_lexicographic() {
        let alphabet = contact_alphabet(&three_contact(), true);
        assert_eq!(alphabet.iter().map(Vec::len).product::<usize>(), 64);
        let all: Vec<_> = (0..64).map(|k| nth_labeling(&alphabet, k)).collect();
        assert!(all.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(contact_alphabet(&three_contact_preloaded(), true)[0].len(), 3);
    }

    #[test]
    fn fixture_verdicts() {
        let model = three_contact();
        assert!(brute_force_verdict(&model, &[0.0, -1.0, 0.0].into(), true).unwrap().stable);
        let v = brute_force_verdict(&model, &[0.0, 1.0, 0.0].into(), true).unwrap();
        assert!(!v.stable);
        assert_eq!(v.states_tried, 64);
    }

    #[test]
    fn size_guard() {
        let model = GraspModel::new(vec![three_contact().contacts[0].clone(); 13]);
        assert!(brute_force_verdict(&model, &[0.0; 3].into(), false).is_err());
    }
}
