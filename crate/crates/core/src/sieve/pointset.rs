use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{GlobalField, PrimeOfK};
use crate::heights::{height_affine, HeightValue};

/// Reductions of every point of a set modulo one prime, row-major.
#[derive(Clone, Debug)]
pub struct ResidueTable {
    pub norm: u64,
    pub dim: usize,
    pub res: Vec<u64>,
}

impl ResidueTable {
    pub fn get(&self, i: usize, c: usize) -> u64 {
        self.res[i * self.dim + c]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.res[i * self.dim..(i + 1) * self.dim]
    }

    /// Packs the residues of point `i` at `coords` into one integer
    /// (`coords[0]` is the least significant digit).
    pub fn key(&self, i: usize, coords: &[usize]) -> u128 {
        let n = self.norm as u128;
        coords.iter().rev().fold(0u128, |acc, &c| acc * n + self.get(i, c) as u128)
    }

    pub fn unpack(&self, mut key: u128, len: usize) -> Vec<u64> {
        let n = self.norm as u128;
        (0..len)
            .map(|_| {
                let r = (key % n) as u64;
                key /= n;
                r
            })
            .collect()
    }
}

/// Finite set of distinct affine points of `[N]_{O_K}^d`, sorted
/// lexicographically, with a lazily filled residue cache.
pub struct PointSet<F: GlobalField> {
    field: F,
    dim: usize,
    bound: HeightValue,
    points: Vec<Vec<F::Elem>>,
    cache: RwLock<HashMap<F::Elem, Arc<ResidueTable>>>,
}

impl<F: GlobalField> Clone for PointSet<F> {
    fn clone(&self) -> Self {
        PointSet {
            field: self.field.clone(),
            dim: self.dim,
            bound: self.bound.clone(),
            points: self.points.clone(),
            cache: RwLock::new(HashMap::new()),
        }
    }
}

impl<F: GlobalField> fmt::Debug for PointSet<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointSet")
            .field("field", &self.field.desc())
            .field("dim", &self.dim)
            .field("N", &self.bound)
            .field("len", &self.points.len())
            .finish()
    }
}

impl<F: GlobalField> PointSet<F> {
    /// Sorts and deduplicates. Without an explicit bound, `N` is the largest
    /// coordinate height (at least 1).
    pub fn new(field: F, dim: usize, mut points: Vec<Vec<F::Elem>>, bound: Option<HeightValue>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::Parse(format!("point of arity {} in a set of dimension {dim}", p.len())));
        }
        points.sort();
        points.dedup();
        let max_h = points.iter().map(|p| height_affine(&field, p)).fold(HeightValue::one(), HeightValue::max);
        let bound = match bound {
            Some(n) => {
                if max_h > n {
                    return Err(Error::Parse(format!("a coordinate has height {max_h}, above N = {n}")));
                }
                n
            }
            None => max_h,
        };
        Ok(PointSet { field, dim, bound, points, cache: RwLock::new(HashMap::new()) })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> &HeightValue {
        &self.bound
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<F::Elem>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[F::Elem] {
        &self.points[i]
    }

    /// Position of a point, if present.
    pub fn index_of(&self, x: &[F::Elem]) -> Option<usize> {
        self.points.binary_search_by(|p| p.as_slice().cmp(x)).ok()
    }

    /// Same bound, only the listed members.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        PointSet::new(self.field.clone(), self.dim, points, Some(self.bound.clone())).expect("subset of a valid set")
    }

    /// Cached reductions modulo `p`; built once per prime.
    pub fn residues(&self, p: &PrimeOfK<F::Elem>) -> Arc<ResidueTable> {
        if let Some(t) = self.cache.read().expect("residue cache poisoned").get(&p.generator) {
            return t.clone();
        }
        let reduce_row = |x: &Vec<F::Elem>| x.iter().map(|c| self.field.reduce(c, p)).collect::<Vec<u64>>();
        let rows: Vec<Vec<u64>> = if self.points.len() > 4096 {
            self.points.par_iter().map(reduce_row).collect()
        } else {
            self.points.iter().map(reduce_row).collect()
        };
        let table = Arc::new(ResidueTable { norm: p.norm, dim: self.dim, res: rows.concat() });
        self.cache
            .write()
            .expect("residue cache poisoned")
            .entry(p.generator.clone())
            .or_insert(table)
            .clone()
    }

    /// Canonical JSON: field, dimension, bound and points as coordinate arrays.
    pub fn to_json(&self) -> Value {
        let pts: Vec<Value> = self
            .points
            .iter()
            .map(|p| Value::Array(p.iter().map(|c| self.field.format_elem(c)).collect()))
            .collect();
        json!({
            "field": self.field.desc(),
            "dim": self.dim,
            "N": self.bound.to_string(),
            "points": pts,
        })
    }

    /// Reads `{"dim", "N"?, "points"}`; the field comes from the caller.
    pub fn from_json(field: F, v: &Value) -> Result<Self> {
        let pts = v
            .get("points")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"points\" array".into()))?;
        let mut points = Vec::with_capacity(pts.len());
        for p in pts {
            let coords = p.as_array().ok_or_else(|| Error::Parse("point must be an array".into()))?;
            points.push(coords.iter().map(|c| field.parse_elem(c)).collect::<Result<Vec<_>>>()?);
        }
        let dim = match v.get("dim").and_then(Value::as_u64) {
            Some(d) => d as usize,
            None => points.first().map(|p| p.len()).ok_or_else(|| Error::Parse("cannot infer dimension".into()))?,
        };
        let bound = match v.get("N") {
            Some(n) => Some(serde_json::from_value::<HeightValue>(n.clone())?),
            None => None,
        };
        PointSet::new(field, dim, points, bound)
    }

    /// Hex sha256 of the canonical JSON.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_json().to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
