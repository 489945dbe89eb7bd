use crate::error::{domain, Result};
use crate::prob::{kl_divergence, JointTable};

/// `S(K|F) = D(P_KF || Q_K × P_F)` with `Q_K` uniform on `K`'s alphabet.
pub fn security_index(joint: &JointTable, key: &[&str], observed: &[&str]) -> Result<f64> {
    check(joint, key, observed)?;
    let mut order: Vec<&str> = key.to_vec();
    order.extend_from_slice(observed);
    let p = joint.marginal(&order)?;
    let f = joint.marginal(observed)?;
    let key_cells: usize = p.sizes()[..key.len()].iter().product();
    let uniform = 1.0 / key_cells as f64;
    let product: Vec<f64> = (0..key_cells)
        .flat_map(|_| f.probs().iter().map(|&pf| pf * uniform))
        .collect();
    let q = JointTable::new(p.vars().to_vec(), product)?;
    kl_divergence(&p, &q)
}

/// The two parts of the security index: `(D(P_K || Q_K), I(K;F))`.
pub fn security_index_parts(joint: &JointTable, key: &[&str], observed: &[&str]) -> Result<(f64, f64)> {
    check(joint, key, observed)?;
    let pk = joint.marginal(key)?;
    let uniform = JointTable::uniform(pk.vars().to_vec())?;
    let d = kl_divergence(&pk, &uniform)?;
    let i = joint.mutual_information(key, observed, &[])?;
    Ok((d, i))
}

fn check(joint: &JointTable, key: &[&str], observed: &[&str]) -> Result<()> {
    if key.is_empty() {
        return domain("the key must name at least one variable");
    }
    for k in key {
        if observed.contains(k) {
            return domain(format!("{k} is both key and observation"));
        }
    }
    for v in key.iter().chain(observed) {
        joint.index_of(v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Alphabet;

    fn kf(probs: Vec<f64>) -> JointTable {
        JointTable::new(
            vec![Alphabet::new("K", 2).unwrap(), Alphabet::new("F", 2).unwrap()],
            probs,
        )
        .unwrap()
    }

    #[test]
    fn uniform_independent_key_is_perfect() {
        let t = kf(vec![0.25; 4]);
        assert!(security_index(&t, &["K"], &["F"]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn copied_key_leaks_one_bit() {
        let t = kf(vec![0.5, 0.0, 0.0, 0.5]);
        assert!((security_index(&t, &["K"], &["F"]).unwrap() - 1.0).abs() < 1e-12);
        let (d, i) = security_index_parts(&t, &["K"], &["F"]).unwrap();
        assert!(d.abs() < 1e-12 && (i - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_observation_reduces_to_divergence() {
        let t = kf(vec![0.4, 0.3, 0.2, 0.1]);
        let s = security_index(&t, &["K"], &[]).unwrap();
        let (d, _) = security_index_parts(&t, &["K"], &["F"]).unwrap();
        assert!((s - d).abs() < 1e-12);
    }

    #[test]
    fn overlapping_roles_are_rejected() {
        let t = kf(vec![0.25; 4]);
        assert!(security_index(&t, &["K"], &["K"]).is_err());
        assert!(security_index(&t, &["K"], &["G"]).is_err());
    }
}
