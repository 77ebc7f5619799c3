use crate::error::{Error, Result};

/// Line segments `Conv{0, vᵢ}` with integer vertices, one per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineSegmentSupport {
    vertices: Vec<Vec<i64>>,
}

impl LineSegmentSupport {
    pub fn new(vertices: Vec<Vec<i64>>) -> Self {
        LineSegmentSupport { vertices }
    }

    /// Segments `Conv{0, dᵢ·e_{pᵢ}}` along coordinate axes.
    pub fn axis_aligned(nvars: usize, segments: &[(usize, i64)]) -> Self {
        let vertices = segments
            .iter()
            .map(|&(axis, d)| {
                let mut v = vec![0; nvars];
                v[axis] = d;
                v
            })
            .collect();
        LineSegmentSupport { vertices }
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }
}

/// Mixed volume of origin-rooted segments: `|det[v₁ … vₙ]|`.
pub fn segment_mixed_volume(support: &LineSegmentSupport) -> Result<u128> {
    let n = support.vertices.len();
    for v in &support.vertices {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    let m: Vec<Vec<i128>> = (0..n)
        .map(|r| (0..n).map(|c| support.vertices[c][r] as i128).collect())
        .collect();
    Ok(bareiss_determinant(m).unsigned_abs())
}

/// Fraction-free Gaussian elimination; exact for integer matrices.
fn bareiss_determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_segments() {
        let s = LineSegmentSupport::new(vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(segment_mixed_volume(&s).unwrap(), 1);
    }

    #[test]
    fn general_determinant() {
        let s = LineSegmentSupport::new(vec![vec![2, 1, 0], vec![0, 3, 1], vec![1, 0, 4]]);
        // det of columns = 2*(3*4-0*1) - 0*(...) + 1*(1*1-3*0) with rows/cols transposed
        assert_eq!(segment_mixed_volume(&s).unwrap(), 25);
    }

    #[test]
    fn dependent_segments_have_zero_volume() {
        let s = LineSegmentSupport::new(vec![vec![1, 2], vec![2, 4]]);
        assert_eq!(segment_mixed_volume(&s).unwrap(), 0);
    }

    #[test]
    fn rejects_wrong_count() {
        let s = LineSegmentSupport::new(vec![vec![1, 0, 0], vec![0, 1, 0]]);
        assert!(segment_mixed_volume(&s).is_err());
    }
}
