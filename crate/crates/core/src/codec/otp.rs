use crate::error::{domain, Result};

fn check(a: u64, b: u64, modulus: u64) -> Result<()> {
    if modulus == 0 {
        return domain("one-time pad modulus must be positive");
    }
    if a >= modulus || b >= modulus {
        return domain(format!("pad operands {a}, {b} must lie in [0, {modulus})"));
    }
    Ok(())
}

/// `c = k ⊕ m` (addition modulo the key range).
pub fn otp_encrypt(k: u64, m: u64, modulus: u64) -> Result<u64> {
    check(k, m, modulus)?;
    Ok((k + m) % modulus)
}

/// `m = c ⊖ k`.
pub fn otp_decrypt(c: u64, k: u64, modulus: u64) -> Result<u64> {
    check(c, k, modulus)?;
    Ok((c + modulus - k) % modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        assert_eq!(otp_encrypt(5, 3, 8).unwrap(), 0);
        assert_eq!(otp_decrypt(0, 5, 8).unwrap(), 3);
    }

    #[test]
    fn exhaustive_round_trip() {
        for k in 0..8 {
            for m in 0..8 {
                let c = otp_encrypt(k, m, 8).unwrap();
                assert_eq!(otp_decrypt(c, k, 8).unwrap(), m);
            }
        }
    }

    #[test]
    fn uniform_message_gives_uniform_cipher() {
        // any key law, exhaustive
        let pk = [0.5, 0.25, 0.125, 0.125, 0.0, 0.0, 0.0, 0.0];
        let mut pc = [0.0f64; 8];
        for (k, &w) in pk.iter().enumerate() {
            for m in 0..8 {
                pc[otp_encrypt(k as u64, m, 8).unwrap() as usize] += w / 8.0;
            }
        }
        assert!(pc.iter().all(|&p| (p - 0.125).abs() < 1e-15));
    }

    #[test]
    fn range_violations() {
        assert!(otp_encrypt(8, 0, 8).is_err());
        assert!(otp_decrypt(0, 9, 8).is_err());
        assert!(otp_encrypt(0, 0, 0).is_err());
    }
}
