//! Permutations on `{1, …, n}` stored 0-based.
//!
//! Composition is functional: `(p * q)(i) = p(q(i))`, so `q` acts first.
//! The serialized form is the 1-based one-line image array `[2,1,3,4]`;
//! cycle strings such as `(12)(34)` or `(1,3)(2,4)` are accepted on input.

use crate::error::{Error, Result};

pub type Perm = Vec<u8>;

pub fn identity(degree: usize) -> Perm {
    (0..degree as u8).collect()
}

pub fn compose(p: &[u8], q: &[u8]) -> Perm {
    q.iter().map(|&i| p[i as usize]).collect()
}

pub fn inverse(p: &[u8]) -> Perm {
    let mut out = vec![0u8; p.len()];
    for (i, &j) in p.iter().enumerate() {
        out[j as usize] = i as u8;
    }
    out
}

/// Even permutations have sign `+1`.
pub fn is_even(p: &[u8]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i] as usize;
            len += 1;
        }
        transpositions += len - 1;
    }
    transpositions % 2 == 0
}

/// Validates 1-based images and converts to the internal form.
pub fn from_images(images: &[usize], degree: usize) -> Result<Perm> {
    if images.len() != degree {
        return Err(Error::BadPermutation(format!(
            "expected {degree} images, got {}",
            images.len()
        )));
    }
    if degree > u8::MAX as usize {
        return Err(Error::BadPermutation(format!("degree {degree} too large")));
    }
    let mut seen = vec![false; degree];
    let mut out = Vec::with_capacity(degree);
    for &img in images {
        if img == 0 || img > degree || seen[img - 1] {
            return Err(Error::BadPermutation(format!(
                "{images:?} is not a permutation of 1..={degree}"
            )));
        }
        seen[img - 1] = true;
        out.push((img - 1) as u8);
    }
    Ok(out)
}

/// One-line 1-based image array, e.g. `[2,1,3,4]`.
pub fn to_one_line(p: &[u8]) -> String {
    let parts: Vec<String> = p.iter().map(|&i| (i + 1).to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// Parses `[2,1,3,4]`.
pub fn parse_one_line(text: &str, degree: usize) -> Result<Perm> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::BadPermutation(format!("`{text}` is not an image array")))?;
    let images = inner
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::BadPermutation(format!("`{text}` has a non-numeric entry")))?;
    from_images(&images, degree)
}

/// Parses cycle notation: `()`, `e`, `(12)(34)`, `(1 2)(3 4)` or `(1,2)`.
/// Cycles are composed right to left like group products.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Perm> {
    let text = text.trim();
    let bad = || Error::BadPermutation(format!("`{text}` is not in cycle notation"));
    if text == "e" || text == "()" {
        return Ok(identity(degree));
    }
    if !text.starts_with('(') || !text.ends_with(')') {
        return Err(bad());
    }
    let mut result = identity(degree);
    let body = &text[1..text.len() - 1];
    let cycles: Vec<&str> = body.split(")(").collect();
    for cycle in cycles.into_iter().rev() {
        let points: Vec<usize> = if cycle.contains(',') || cycle.contains(' ') {
            cycle
                .split([',', ' '])
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            cycle
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        let mut images: Vec<usize> = (1..=degree).collect();
        for (k, &p) in points.iter().enumerate() {
            if p == 0 || p > degree {
                return Err(bad());
            }
            images[p - 1] = points[(k + 1) % points.len()];
        }
        let cyc = from_images(&images, degree)?;
        result = compose(&cyc, &result);
    }
    Ok(result)
}
