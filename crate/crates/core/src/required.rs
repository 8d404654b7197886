use crate::error::{Error, Result};

/// Solution components the caller asks for, as sorted distinct 1-based
/// indices into `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequiredSet {
    n: usize,
    indices: Vec<usize>,
}

impl RequiredSet {
    pub fn new(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::InvalidArgument(
                "required set must not be empty".into(),
            ));
        }
        Ok(RequiredSet { n, indices })
    }

    /// Every variable required: plain inversion.
    pub fn all(n: usize) -> Self {
        RequiredSet {
            n,
            indices: (1..=n).collect(),
        }
    }

    /// The trailing block `n-p+1 ..= n`.
    pub fn trailing(n: usize, p: usize) -> Result<Self> {
        if p == 0 || p > n {
            return Err(Error::InvalidArgument(format!(
                "trailing block size {p} outside 1..={n}"
            )));
        }
        Self::new(n, (n - p + 1)..=n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of required variables (the `p` of the count formulas).
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `true` if 1-based index `i` is required.
    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Membership by 0-based row, as a dense mask.
    pub(crate) fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for &i in &self.indices {
            m[i - 1] = true;
        }
        m
    }

    /// `true` if the set is exactly `n-p+1 ..= n` for its own size `p`.
    pub fn is_trailing(&self) -> bool {
        let p = self.indices.len();
        self.indices.iter().copied().eq((self.n - p + 1)..=self.n)
    }
}
