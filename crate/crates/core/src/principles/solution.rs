use std::fmt;

use crate::numerics::{ApartSet, BlockSequence, FiniteSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Plain(FiniteSet),
    Apart(ApartSet),
    Blocks(BlockSequence),
    Polarized(Vec<FiniteSet>),
}

impl Shape {
    pub fn kind(&self) -> &'static str {
        match self {
            Shape::Plain(_) => "plain",
            Shape::Apart(_) => "apart",
            Shape::Blocks(_) => "blocks",
            Shape::Polarized(_) => "polarized",
        }
    }

    /// The underlying set for the single-set shapes.
    pub fn as_set(&self) -> Option<&FiniteSet> {
        match self {
            Shape::Plain(s) => Some(s),
            Shape::Apart(a) => Some(a.members()),
            _ => None,
        }
    }
}

/// A candidate solution. `lengths` carries the witnessed pair `{a, b}` for
/// the existential length principle and is `None` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    pub shape: Shape,
    pub claimed_color: Option<u32>,
    pub lengths: Option<Vec<u32>>,
}

impl Solution {
    pub fn new(shape: Shape) -> Self {
        Solution {
            shape,
            claimed_color: None,
            lengths: None,
        }
    }

    pub fn plain(set: FiniteSet) -> Self {
        Solution::new(Shape::Plain(set))
    }

    pub fn apart(set: ApartSet) -> Self {
        Solution::new(Shape::Apart(set))
    }

    pub fn blocks(blocks: BlockSequence) -> Self {
        Solution::new(Shape::Blocks(blocks))
    }

    pub fn polarized(sets: Vec<FiniteSet>) -> Self {
        Solution::new(Shape::Polarized(sets))
    }

    pub fn with_color(mut self, color: Option<u32>) -> Self {
        self.claimed_color = color;
        self
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Plain(s) => write!(f, "{s}")?,
            Shape::Apart(a) => write!(f, "{} ({}-apart)", a.members(), a.base())?,
            Shape::Blocks(b) => {
                let parts: Vec<String> = b.blocks().iter().map(ToString::to_string).collect();
                write!(f, "[{}]", parts.join(", "))?
            }
            Shape::Polarized(sets) => {
                let parts: Vec<String> = sets.iter().map(ToString::to_string).collect();
                write!(f, "({})", parts.join(", "))?
            }
        }
        if let Some(l) = &self.lengths {
            write!(f, " lengths {l:?}")?;
        }
        Ok(())
    }
}
