use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use locsim::perm::Perm;
use locsim::simstruct::{parse_similarity, SimStructure, DEFAULT_FINITE_CAP};
use locsim::ultrametric::Space;
use locsim::{Error, Result};

/// The `sim` line of a group descriptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimLine {
    Permutational(TailGroup),
    Mirror,
    Minus(Box<SimLine>),
    /// File of similarity lines, relative to the descriptor's directory.
    Finite(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailGroup {
    Trivial,
    Full,
    Generators(Vec<Perm>),
}

/// `name`, `space` and `sim` lines describing one structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub name: Option<String>,
    pub space: Space,
    pub sim: SimLine,
    /// Directory against which `sim finite` paths resolve.
    pub base_dir: PathBuf,
}

impl GroupDescriptor {
    /// Built-in descriptors: `vd<d>`, `vd<d>-full`, `mirror`.
    pub fn preset(name: &str) -> Option<GroupDescriptor> {
        let (space, sim) = if name == "mirror" {
            (Space::word(2).ok()?, SimLine::Mirror)
        } else {
            let rest = name.strip_prefix("vd")?;
            let (d, tails) = match rest.strip_suffix("-full") {
                Some(d) => (d, TailGroup::Full),
                None => (rest, TailGroup::Trivial),
            };
            (Space::word(d.parse().ok()?).ok()?, SimLine::Permutational(tails))
        };
        Some(GroupDescriptor { name: None, space, sim, base_dir: PathBuf::new() })
    }

    /// A preset name or a path to a descriptor file.
    pub fn load(arg: &str) -> Result<GroupDescriptor> {
        if let Some(d) = GroupDescriptor::preset(arg) {
            return Ok(d);
        }
        let path = Path::new(arg);
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidStructure(format!("unknown group {arg:?}: {e}")))?;
        let mut d = GroupDescriptor::parse(&text)?;
        d.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(d)
    }

    pub fn parse(text: &str) -> Result<GroupDescriptor> {
        let mut name = None;
        let mut space = None;
        let mut sim = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: String| Error::Syntax { line: line_no, message };
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "name" if !rest.trim().is_empty() => name = Some(rest.trim().to_string()),
                "space" => space = Some(parse_space(rest.trim()).map_err(|e| syntax(e.to_string()))?),
                "sim" => sim = Some(parse_sim(rest.trim()).map_err(|e| syntax(e.to_string()))?),
                _ => return Err(syntax(format!("unexpected line {line:?}"))),
            }
        }
        let space = space.ok_or_else(|| Error::Syntax { line: 0, message: "missing `space` line".into() })?;
        let sim = sim.ok_or_else(|| Error::Syntax { line: 0, message: "missing `sim` line".into() })?;
        Ok(GroupDescriptor { name, space, sim, base_dir: PathBuf::new() })
    }

    pub fn build(&self) -> Result<Arc<SimStructure>> {
        let s = build_sim(&self.space, &self.sim, &self.base_dir)?;
        Ok(Arc::new(match &self.name {
            Some(n) => s.with_name(n.clone()),
            None => s,
        }))
    }
}

fn parse_space(text: &str) -> Result<Space> {
    if let Some(d) = text.strip_prefix("word d=") {
        let d = d.trim().parse().map_err(|_| Error::InvalidSpace(format!("bad alphabet size in {text:?}")))?;
        Space::word(d)
    } else if let Some(tree) = text.strip_prefix("finite tree=") {
        Space::finite(tree.trim())
    } else {
        Err(Error::InvalidSpace(format!("expected `word d=<n>` or `finite tree=<tree>`, found {text:?}")))
    }
}

fn parse_sim(text: &str) -> Result<SimLine> {
    let (kind, rest) = text.split_once(' ').unwrap_or((text, ""));
    let rest = rest.trim();
    match kind {
        "permutational" => {
            let h = rest
                .strip_prefix("H=")
                .ok_or_else(|| Error::InvalidStructure(format!("expected H=..., found {rest:?}")))?;
            let tails = match h {
                "trivial" => TailGroup::Trivial,
                "full" => TailGroup::Full,
                list => TailGroup::Generators(list.split(',').map(|p| p.trim().parse()).collect::<Result<Vec<_>>>()?),
            };
            Ok(SimLine::Permutational(tails))
        }
        "mirror" if rest.is_empty() => Ok(SimLine::Mirror),
        "minus" => Ok(SimLine::Minus(Box::new(parse_sim(rest)?))),
        "finite" if !rest.is_empty() => Ok(SimLine::Finite(PathBuf::from(rest))),
        _ => Err(Error::InvalidStructure(format!("unknown sim rule {text:?}"))),
    }
}

fn build_sim(space: &Space, sim: &SimLine, base_dir: &Path) -> Result<SimStructure> {
    match sim {
        SimLine::Permutational(tails) => {
            let Space::Word { d } = *space else {
                return Err(Error::InvalidStructure("permutational structures need a word space".into()));
            };
            match tails {
                TailGroup::Trivial => SimStructure::permutational(d, &[]),
                TailGroup::Full => SimStructure::permutational_full(d),
                TailGroup::Generators(g) => SimStructure::permutational(d, g),
            }
        }
        SimLine::Mirror => {
            if *space != (Space::Word { d: 2 }) {
                return Err(Error::InvalidStructure("the mirror structure lives on the binary word space".into()));
            }
            Ok(SimStructure::mirror())
        }
        SimLine::Minus(base) => Ok(SimStructure::minus(Arc::new(build_sim(space, base, base_dir)?))),
        SimLine::Finite(file) => {
            let path = base_dir.join(file);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::InvalidStructure(format!("cannot read {}: {e}", path.display())))?;
            let gens = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'))
                .map(|(i, l)| parse_similarity(space, l.trim(), i + 1))
                .collect::<Result<Vec<_>>>()?;
            SimStructure::finite(space.clone(), gens, DEFAULT_FINITE_CAP)
        }
    }
}

impl fmt::Display for SimLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimLine::Permutational(TailGroup::Trivial) => write!(f, "permutational H=trivial"),
            SimLine::Permutational(TailGroup::Full) => write!(f, "permutational H=full"),
            SimLine::Permutational(TailGroup::Generators(g)) => {
                let parts: Vec<String> = g.iter().map(Perm::image_string).collect();
                write!(f, "permutational H={}", parts.join(","))
            }
            SimLine::Mirror => write!(f, "mirror"),
            SimLine::Minus(base) => write!(f, "minus {base}"),
            SimLine::Finite(p) => write!(f, "finite {}", p.display()),
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            writeln!(f, "name {n}")?;
        }
        writeln!(f, "{}", self.space)?;
        writeln!(f, "sim {}", self.sim)
    }
}
