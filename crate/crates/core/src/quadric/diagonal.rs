//! Congruence diagonalization over Q, kept fraction-free.

use num_integer::Integer;

use crate::error::{Error, Result};

use super::{Matrix4, QuadricForm};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagonalization {
    /// Diagonal form `Bᵀ M B`.
    pub form: QuadricForm,
    /// Change of basis; column `j` is the `j`-th new basis vector.
    pub basis: Matrix4,
}

fn bilinear(form: &QuadricForm, x: &[i128; 4], y: &[i128; 4]) -> Result<i128> {
    let my = form.apply(y)?;
    let mut acc: i128 = 0;
    for i in 0..4 {
        acc = acc
            .checked_add(x[i].checked_mul(my[i]).ok_or(Error::Overflow)?)
            .ok_or(Error::Overflow)?;
    }
    Ok(acc)
}

fn primitive(v: [i128; 4]) -> [i128; 4] {
    let g = v.iter().fold(0i128, |g, &c| g.gcd(&c));
    if g <= 1 {
        v
    } else {
        v.map(|c| c / g)
    }
}

/// Finds an integral basis `B` with `Bᵀ M B` diagonal. A diagonal form is
/// returned unchanged with the identity basis.
pub fn diagonalize(form: &QuadricForm) -> Result<Diagonalization> {
    if form.determinant() == 0 {
        return Err(Error::DegenerateForm);
    }
    let mut vectors: [[i128; 4]; 4] = std::array::from_fn(|i| {
        let mut e = [0i128; 4];
        e[i] = 1;
        e
    });
    for i in 0..4 {
        if bilinear(form, &vectors[i], &vectors[i])? == 0 {
            if let Some(j) = (i + 1..4)
                .map(|j| Ok((j, bilinear(form, &vectors[j], &vectors[j])?)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .find(|&(_, q)| q != 0)
                .map(|(j, _)| j)
            {
                vectors.swap(i, j);
            } else {
                // all remaining vectors are isotropic; b_i + b_j has value 2B(b_i, b_j)
                let mut partner = None;
                for j in i + 1..4 {
                    if bilinear(form, &vectors[i], &vectors[j])? != 0 {
                        partner = Some(j);
                        break;
                    }
                }
                let j = partner.ok_or(Error::DegenerateForm)?;
                let vj = vectors[j];
                for (c, d) in vectors[i].iter_mut().zip(vj) {
                    *c = c.checked_add(d).ok_or(Error::Overflow)?;
                }
            }
        }
        let pivot = bilinear(form, &vectors[i], &vectors[i])?;
        let vi = vectors[i];
        for vj in vectors.iter_mut().skip(i + 1) {
            let b = bilinear(form, &vi, vj)?;
            if b == 0 {
                continue;
            }
            // v_j ← pivot·v_j − b·v_i is orthogonal to v_i
            let mut next = [0i128; 4];
            for k in 0..4 {
                let a = pivot.checked_mul(vj[k]).ok_or(Error::Overflow)?;
                let c = b.checked_mul(vi[k]).ok_or(Error::Overflow)?;
                next[k] = a.checked_sub(c).ok_or(Error::Overflow)?;
            }
            *vj = primitive(next);
        }
    }
    let mut entries = [0i128; 4];
    for i in 0..4 {
        entries[i] = bilinear(form, &vectors[i], &vectors[i])?;
    }
    let mut basis = [[0i128; 4]; 4];
    for (j, v) in vectors.iter().enumerate() {
        for i in 0..4 {
            basis[i][j] = v[i];
        }
    }
    Ok(Diagonalization { form: QuadricForm::diagonal(entries)?, basis })
}
