//! JSON fixture formats and a loader that resolves names against the
//! built-ins and paths against a fixture root.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures;
use crate::group::FiniteGroup;
use crate::lattice::FiniteLattice;
use crate::lset::LSubset;

/// L-subset file: `{"group", "lattice", "default", "values": {element: value}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LSubsetFile {
    pub group: String,
    pub lattice: String,
    pub default: String,
    #[serde(default)]
    pub values: BTreeMap<String, String>,
}

impl LSubsetFile {
    /// Serializable form; the most frequent value becomes the default.
    pub fn from_lsubset(mu: &LSubset, group: &str, lattice: &str) -> Self {
        let mut counts = vec![0usize; mu.lattice().size()];
        for v in mu.values() {
            counts[v.index()] += 1;
        }
        let default_ix = (0..counts.len())
            .max_by_key(|&i| (counts[i], std::cmp::Reverse(i)))
            .unwrap_or(0);
        let l = mu.lattice();
        let values = mu
            .group()
            .elements()
            .filter(|&x| mu.value(x).index() != default_ix)
            .map(|x| (mu.group().display(x), l.label(mu.value(x)).to_string()))
            .collect();
        LSubsetFile {
            group: group.to_string(),
            lattice: lattice.to_string(),
            default: l.labels()[default_ix].clone(),
            values,
        }
    }
}

/// Loads groups, lattices and L-subsets, sharing one `Arc` per source so
/// L-subsets from different files compare cheaply.
#[derive(Default)]
pub struct Loader {
    root: Option<PathBuf>,
    groups: Mutex<HashMap<String, Arc<FiniteGroup>>>,
    lattices: Mutex<HashMap<String, Arc<FiniteLattice>>>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

impl Loader {
    pub fn new(root: Option<PathBuf>) -> Self {
        Loader {
            root,
            ..Self::default()
        }
    }

    /// Tries `reference` as given, then relative to `base`, then to the root.
    fn locate(&self, reference: &str, base: Option<&Path>) -> Result<PathBuf> {
        let direct = PathBuf::from(reference);
        let mut tried = vec![direct.clone()];
        if let Some(base) = base {
            tried.push(base.join(reference));
        }
        if let Some(root) = &self.root {
            tried.push(root.join(reference));
        }
        if direct.is_absolute() {
            tried.truncate(1);
        }
        tried
            .into_iter()
            .find(|p| p.is_file())
            .ok_or_else(|| Error::Input(format!("cannot find `{reference}`")))
    }

    fn cached<T>(
        cache: &Mutex<HashMap<String, Arc<T>>>,
        key: String,
        make: impl FnOnce() -> Result<Arc<T>>,
    ) -> Result<Arc<T>> {
        if let Some(v) = cache.lock().expect("loader cache").get(&key) {
            return Ok(v.clone());
        }
        let v = make()?;
        cache.lock().expect("loader cache").insert(key, v.clone());
        Ok(v)
    }

    pub fn lattice(&self, reference: &str, base: Option<&Path>) -> Result<Arc<FiniteLattice>> {
        if fixtures::LATTICE_NAMES.contains(&reference) {
            return Self::cached(&self.lattices, reference.to_string(), || {
                fixtures::lattice(reference)
            });
        }
        let path = self.locate(reference, base)?;
        let key = path
            .canonicalize()
            .unwrap_or(path.clone())
            .display()
            .to_string();
        Self::cached(&self.lattices, key, || {
            Ok(Arc::new(FiniteLattice::from_json(&read(&path)?)?))
        })
    }

    pub fn group(&self, reference: &str, base: Option<&Path>) -> Result<Arc<FiniteGroup>> {
        if fixtures::GROUP_NAMES.contains(&reference) {
            return Self::cached(&self.groups, reference.to_string(), || {
                fixtures::group(reference)
            });
        }
        let path = self.locate(reference, base)?;
        let key = path
            .canonicalize()
            .unwrap_or(path.clone())
            .display()
            .to_string();
        Self::cached(&self.groups, key, || {
            Ok(Arc::new(FiniteGroup::from_json(&read(&path)?)?))
        })
    }

    pub fn lsubset_from(&self, file: &LSubsetFile, base: Option<&Path>) -> Result<LSubset> {
        let g = self.group(&file.group, base)?;
        let l = self.lattice(&file.lattice, base)?;
        let pairs: Vec<(&str, &str)> = file
            .values
            .iter()
            .map(|(x, a)| (x.as_str(), a.as_str()))
            .collect();
        LSubset::from_assignments(&g, &l, &pairs, &file.default)
    }

    pub fn lsubset(&self, reference: &str) -> Result<LSubset> {
        let path = self.locate(reference, None)?;
        let file: LSubsetFile = serde_json::from_str(&read(&path)?)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        self.lsubset_from(&file, path.parent())
    }
}
