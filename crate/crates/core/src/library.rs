//! Gene libraries: `l` component lists of `c` fixed-length components
//! each. Concatenating one component per library expresses one of the
//! `c^l` possible antibodies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::JobId;
use crate::matching::{Antibody, MatchError, Symbol};

/// A fixed-length run of symbols stored in one library slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub symbols: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneLibrary {
    libraries: Vec<Vec<Component>>,
    component_length: usize,
    wildcard_rate: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LibraryError {
    #[error("library shape parameters must all be positive")]
    InvalidShape,
    #[error("component index {index} is out of range 0..{count}")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("expected {expected} component indices, got {found}")]
    WrongIndexCount { expected: usize, found: usize },
    #[error("c^l = {c}^{l} overflows the supported range")]
    Overflow { c: u64, l: u32 },
    #[error("library text is malformed at line {line}")]
    Malformed { line: usize },
    #[error(transparent)]
    Antibody(#[from] MatchError),
}

impl GeneLibrary {
    /// Seeds `l` libraries of `c` components, `component_length` symbols
    /// each. Every symbol is the wildcard with probability
    /// `wildcard_rate`, otherwise uniform over `job_ids`. Duplicate job
    /// ids across an expressed antibody are tolerated here and wildcarded
    /// at expression time.
    pub fn init(
        seed: u64,
        l: usize,
        c: usize,
        component_length: usize,
        job_ids: &[JobId],
        wildcard_rate: f64,
    ) -> Result<Self, LibraryError> {
        if l == 0 || c == 0 || component_length == 0 || job_ids.is_empty() {
            return Err(LibraryError::InvalidShape);
        }
        if !(0.0..=1.0).contains(&wildcard_rate) {
            return Err(LibraryError::InvalidShape);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let libraries = (0..l)
            .map(|_| {
                (0..c)
                    .map(|_| Component {
                        symbols: (0..component_length)
                            .map(|_| {
                                if rng.random_bool(wildcard_rate) {
                                    Symbol::Wildcard
                                } else {
                                    Symbol::Job(job_ids[rng.random_range(0..job_ids.len())])
                                }
                            })
                            .collect(),
                    })
                    .collect()
            })
            .collect();
        Ok(GeneLibrary {
            libraries,
            component_length,
            wildcard_rate,
        })
    }

    /// Builds a library from explicit components; all must share one
    /// length and every library one size.
    pub fn from_components(
        libraries: Vec<Vec<Component>>,
        wildcard_rate: f64,
    ) -> Result<Self, LibraryError> {
        let l = libraries.len();
        let c = libraries.first().map(|lib| lib.len()).unwrap_or(0);
        if l == 0 || c == 0 {
            return Err(LibraryError::InvalidShape);
        }
        let component_length = libraries[0]
            .first()
            .map(|comp| comp.symbols.len())
            .unwrap_or(0);
        if component_length == 0 {
            return Err(LibraryError::InvalidShape);
        }
        for lib in &libraries {
            if lib.len() != c || lib.iter().any(|comp| comp.symbols.len() != component_length) {
                return Err(LibraryError::InvalidShape);
            }
        }
        Ok(GeneLibrary {
            libraries,
            component_length,
            wildcard_rate,
        })
    }

    pub fn library_count(&self) -> usize {
        self.libraries.len()
    }

    pub fn components_per_library(&self) -> usize {
        self.libraries[0].len()
    }

    pub fn component_length(&self) -> usize {
        self.component_length
    }

    pub fn wildcard_rate(&self) -> f64 {
        self.wildcard_rate
    }

    /// Length of every expressed antibody: `l * component_length`.
    pub fn antibody_length(&self) -> usize {
        self.library_count() * self.component_length
    }

    pub fn component(&self, library: usize, index: usize) -> Option<&Component> {
        self.libraries.get(library).and_then(|lib| lib.get(index))
    }

    /// Expresses the antibody picked by one component index per library.
    /// Job ids already seen earlier in the concatenation degrade to
    /// wildcards so the result stays a valid antibody.
    pub fn express(&self, indices: &[usize]) -> Result<Antibody, LibraryError> {
        if indices.len() != self.library_count() {
            return Err(LibraryError::WrongIndexCount {
                expected: self.library_count(),
                found: indices.len(),
            });
        }
        let c = self.components_per_library();
        let mut symbols = Vec::with_capacity(self.antibody_length());
        for (lib, &index) in self.libraries.iter().zip(indices) {
            if index >= c {
                return Err(LibraryError::IndexOutOfRange { index, count: c });
            }
            symbols.extend(lib[index].symbols.iter().copied());
        }
        Ok(Antibody::new(dedup_to_wildcards(symbols))?)
    }

    /// One uniformly random index tuple, suitable for [`Self::express`].
    pub fn random_indices(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let c = self.components_per_library();
        (0..self.library_count())
            .map(|_| rng.random_range(0..c))
            .collect()
    }

    /// Serializes as structured text: a header line `l c component_length
    /// wildcard_rate`, then one comma-separated component per line in
    /// library-major order.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {}\n",
            self.library_count(),
            self.components_per_library(),
            self.component_length,
            self.wildcard_rate,
        );
        for lib in &self.libraries {
            for comp in lib {
                let tokens: Vec<String> = comp.symbols.iter().map(|s| s.to_string()).collect();
                out.push_str(&tokens.join(","));
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LibraryError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(LibraryError::Malformed { line: 1 })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(LibraryError::Malformed { line: 1 });
        }
        let l: usize = fields[0].parse().map_err(|_| LibraryError::Malformed { line: 1 })?;
        let c: usize = fields[1].parse().map_err(|_| LibraryError::Malformed { line: 1 })?;
        let len: usize = fields[2].parse().map_err(|_| LibraryError::Malformed { line: 1 })?;
        let rate: f64 = fields[3].parse().map_err(|_| LibraryError::Malformed { line: 1 })?;
        let mut libraries = Vec::with_capacity(l);
        for _ in 0..l {
            let mut lib = Vec::with_capacity(c);
            for _ in 0..c {
                let (no, line) = lines
                    .next()
                    .ok_or(LibraryError::Malformed { line: usize::MAX })?;
                let symbols: Result<Vec<Symbol>, _> = line
                    .split(',')
                    .map(|tok| match tok.trim() {
                        "*" => Ok(Symbol::Wildcard),
                        t => t
                            .parse::<JobId>()
                            .map(Symbol::Job)
                            .map_err(|_| LibraryError::Malformed { line: no + 1 }),
                    })
                    .collect();
                let symbols = symbols?;
                if symbols.len() != len {
                    return Err(LibraryError::Malformed { line: no + 1 });
                }
                lib.push(Component { symbols });
            }
            libraries.push(lib);
        }
        GeneLibrary::from_components(libraries, rate)
    }
}

/// Replaces later repeats of a job id with wildcards, preserving length.
pub(crate) fn dedup_to_wildcards(symbols: Vec<Symbol>) -> Vec<Symbol> {
    let mut seen = Vec::new();
    symbols
        .into_iter()
        .map(|sym| match sym {
            Symbol::Job(id) if seen.contains(&id) => Symbol::Wildcard,
            Symbol::Job(id) => {
                seen.push(id);
                Symbol::Job(id)
            }
            Symbol::Wildcard => Symbol::Wildcard,
        })
        .collect()
}

/// Number of distinct index tuples: `c^l`.
pub fn expressible_count(l: usize, c: usize) -> Result<u64, LibraryError> {
    if l == 0 || c == 0 {
        return Err(LibraryError::InvalidShape);
    }
    let mut total: u64 = 1;
    for _ in 0..l {
        total = total
            .checked_mul(c as u64)
            .ok_or(LibraryError::Overflow {
                c: c as u64,
                l: l as u32,
            })?;
    }
    Ok(total)
}
