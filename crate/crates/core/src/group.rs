//! Symbolic descriptions of the groups computed by the library.
//!
//! Results of the exact-sequence analysis are group-valued but rarely plain
//! numbers: unit groups of the coefficient ring, general linear groups,
//! automorphism groups of finitely generated modules, products, and
//! (possibly split) extensions. [`GroupExpression`] captures these shapes
//! symbolically; [`GroupExpression::simplify`] collapses trivial parts, and
//! the `Display` implementation renders the canonical text used in reports
//! (`0`, `R*`, `GL_2(R)`, `aut(Z/5)`, `R ⊕ (R* × R*)`, ...).

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::ring::ModuleDescription;

/// Whether an extension is known to split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitStatus {
    /// A splitting exists (so the group is a semidirect/direct sum shape).
    Split,
    /// No splitting is asserted.
    Unknown,
}

/// A symbolic group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupExpression {
    /// The trivial group.
    Trivial,
    /// The additive group of a finitely generated `R`-module.
    RModule(ModuleDescription),
    /// The unit group `R*`.
    Units,
    /// `GL_j(R)`.
    GeneralLinear(usize),
    /// The automorphism group of a module, with its order when it has been
    /// established by exhaustive verification.
    Aut {
        module: ModuleDescription,
        order: Option<BigUint>,
    },
    /// A direct product.
    Product(Vec<GroupExpression>),
    /// An extension `1 -> kernel -> G -> quotient -> 1`.
    Extension {
        kernel: Box<GroupExpression>,
        quotient: Box<GroupExpression>,
        split: SplitStatus,
    },
    /// A finite group known only by its order.
    Finite(BigUint),
    /// A subgroup of `ambient` cut out by a stated compatibility condition.
    SubgroupConstraint {
        ambient: Box<GroupExpression>,
        constraint: String,
    },
    /// A group exhibited as infinite by an explicit family of elements.
    InfiniteFamily(String),
}

impl GroupExpression {
    pub fn product(factors: Vec<GroupExpression>) -> GroupExpression {
        GroupExpression::Product(factors).simplify()
    }

    pub fn extension(
        kernel: GroupExpression,
        quotient: GroupExpression,
        split: SplitStatus,
    ) -> GroupExpression {
        GroupExpression::Extension {
            kernel: Box::new(kernel),
            quotient: Box::new(quotient),
            split,
        }
        .simplify()
    }

    /// Collapse trivial kernels, factors and degenerate shapes.
    pub fn simplify(&self) -> GroupExpression {
        match self {
            GroupExpression::RModule(m) if m.is_zero() => GroupExpression::Trivial,
            GroupExpression::Aut { module, order } => {
                if module.is_zero() {
                    GroupExpression::Trivial
                } else if module.is_free() {
                    match module.free_rank {
                        1 => GroupExpression::Units,
                        j => GroupExpression::GeneralLinear(j),
                    }
                } else {
                    GroupExpression::Aut {
                        module: module.clone(),
                        order: order.clone(),
                    }
                }
            }
            GroupExpression::Product(items) => {
                let mut flat = Vec::new();
                for item in items {
                    match item.simplify() {
                        GroupExpression::Trivial => {}
                        GroupExpression::Product(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                match flat.len() {
                    0 => GroupExpression::Trivial,
                    1 => flat.pop().unwrap(),
                    _ => GroupExpression::Product(flat),
                }
            }
            GroupExpression::Extension {
                kernel,
                quotient,
                split,
            } => {
                let k = kernel.simplify();
                let q = quotient.simplify();
                match (k, q) {
                    (GroupExpression::Trivial, q) => q,
                    (k, GroupExpression::Trivial) => k,
                    (k, q) => GroupExpression::Extension {
                        kernel: Box::new(k),
                        quotient: Box::new(q),
                        split: *split,
                    },
                }
            }
            GroupExpression::Finite(n) if n.is_one() => GroupExpression::Trivial,
            GroupExpression::SubgroupConstraint { ambient, constraint } => {
                GroupExpression::SubgroupConstraint {
                    ambient: Box::new(ambient.simplify()),
                    constraint: constraint.clone(),
                }
            }
            other => other.clone(),
        }
    }

    /// The order of the group when it is finite and the expression carries
    /// enough information to know it.
    pub fn finite_order(&self) -> Option<BigUint> {
        match self {
            GroupExpression::Trivial => Some(BigUint::one()),
            GroupExpression::RModule(m) => m.order(),
            GroupExpression::Aut { order, .. } => order.clone(),
            GroupExpression::Finite(n) => Some(n.clone()),
            GroupExpression::Product(items) => {
                let mut n = BigUint::one();
                for item in items {
                    n *= item.finite_order()?;
                }
                Some(n)
            }
            GroupExpression::Extension {
                kernel, quotient, ..
            } => Some(kernel.finite_order()? * quotient.finite_order()?),
            _ => None,
        }
    }

    /// Whether the display of this expression needs parentheses inside a
    /// product.
    fn composite(&self) -> bool {
        match self {
            GroupExpression::Product(_)
            | GroupExpression::Extension { .. }
            | GroupExpression::SubgroupConstraint { .. }
            | GroupExpression::InfiniteFamily(_)
            | GroupExpression::Finite(_) => true,
            GroupExpression::RModule(m) => m.free_rank.min(1) + m.torsion.len() > 1,
            _ => false,
        }
    }

    fn fmt_factor(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.composite() {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for GroupExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupExpression::Trivial => write!(f, "0"),
            GroupExpression::RModule(m) => write!(f, "{m}"),
            GroupExpression::Units => write!(f, "R*"),
            GroupExpression::GeneralLinear(j) => write!(f, "GL_{j}(R)"),
            GroupExpression::Aut { module, .. } => write!(f, "aut({module})"),
            GroupExpression::Product(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " × ")?;
                    }
                    item.fmt_factor(f)?;
                }
                Ok(())
            }
            GroupExpression::Extension {
                kernel,
                quotient,
                split,
            } => match split {
                SplitStatus::Split => {
                    kernel.fmt_factor(f)?;
                    write!(f, " ⊕ ")?;
                    write!(f, "({quotient})")
                }
                SplitStatus::Unknown => write!(f, "ext({kernel}; {quotient})"),
            },
            GroupExpression::Finite(n) => write!(f, "finite group of order {n}"),
            GroupExpression::SubgroupConstraint {
                ambient,
                constraint,
            } => write!(f, "subgroup of {ambient} ({constraint})"),
            GroupExpression::InfiniteFamily(desc) => write!(f, "infinite family: {desc}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn z5() -> ModuleDescription {
        ModuleDescription::from_invariant_factors(&[BigUint::from(5u32)])
    }

    #[test]
    fn display_pinned_forms() {
        assert_eq!(GroupExpression::Trivial.to_string(), "0");
        assert_eq!(GroupExpression::Units.to_string(), "R*");
        assert_eq!(GroupExpression::GeneralLinear(2).to_string(), "GL_2(R)");
        assert_eq!(
            GroupExpression::Aut {
                module: z5(),
                order: Some(BigUint::from(4u32))
            }
            .to_string(),
            "aut(Z/5)"
        );
        let prod = GroupExpression::Product(vec![
            GroupExpression::Units,
            GroupExpression::Units,
        ]);
        assert_eq!(prod.to_string(), "R* × R*");
        let ext = GroupExpression::Extension {
            kernel: Box::new(GroupExpression::RModule(ModuleDescription::free(1))),
            quotient: Box::new(prod),
            split: SplitStatus::Split,
        };
        assert_eq!(ext.to_string(), "R ⊕ (R* × R*)");
    }

    #[test]
    fn simplify_collapses_trivial_parts() {
        let e = GroupExpression::extension(
            GroupExpression::RModule(ModuleDescription::zero()),
            GroupExpression::Product(vec![
                GroupExpression::Trivial,
                GroupExpression::Units,
                GroupExpression::Product(vec![GroupExpression::Units, GroupExpression::Trivial]),
            ]),
            SplitStatus::Split,
        );
        assert_eq!(e.to_string(), "R* × R*");
        let lone = GroupExpression::product(vec![GroupExpression::Aut {
            module: ModuleDescription::free(1),
            order: None,
        }]);
        assert_eq!(lone, GroupExpression::Units);
        assert_eq!(
            GroupExpression::product(vec![]).to_string(),
            "0"
        );
    }

    #[test]
    fn finite_orders_multiply() {
        let e = GroupExpression::Product(vec![
            GroupExpression::Aut {
                module: z5(),
                order: Some(BigUint::from(4u32)),
            },
            GroupExpression::RModule(ModuleDescription::from_invariant_factors(&[
                BigUint::from(3u32),
            ])),
        ]);
        assert_eq!(e.finite_order(), Some(BigUint::from(12u32)));
        assert_eq!(GroupExpression::Units.finite_order(), None);
    }

    #[test]
    fn product_display_parenthesizes_composites() {
        let m = ModuleDescription {
            free_rank: 1,
            torsion: vec![(BigUint::from(5u32), 1)],
        };
        let e = GroupExpression::Product(vec![
            GroupExpression::Aut {
                module: m.clone(),
                order: None,
            },
            GroupExpression::Units,
        ]);
        assert_eq!(e.to_string(), "aut(R ⊕ Z/5) × R*");
        let e2 = GroupExpression::Product(vec![
            GroupExpression::RModule(m),
            GroupExpression::Units,
        ]);
        assert_eq!(e2.to_string(), "(R ⊕ Z/5) × R*");
    }
}
