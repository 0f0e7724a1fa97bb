//! Motion codes: the condensed 9-bit manipulation taxonomy.
//!
//! A [`MotionCode`] is built from five independent components. Its bit
//! image is laid out as
//!
//! ```text
//! interaction(3) · recurrence(1) · prismatic(2) · revolute(2) · passive(1)
//! ```
//!
//! and its string image groups those bits with hyphens, e.g. `101-0-01-01-0`.
//! Every value of the type is a valid code; invalid bit patterns (a
//! non-contact interaction with engagement bits set, or a trajectory group
//! equal to `10`) cannot be represented.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of bits in a motion code.
pub const CODE_BITS: usize = 9;

/// Number of structurally valid motion codes.
pub const VALID_CODE_COUNT: usize = 180;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("malformed motion code {text:?}: {reason}")]
    MalformedSyntax { text: String, reason: String },
    #[error("invalid interaction group {group:?}: a non-contact interaction must be 000")]
    InvalidInteraction { group: String },
    #[error("invalid {component} group {group:?}: expected one of 00, 01, 11")]
    InvalidDof {
        component: TrajectoryKind,
        group: String,
    },
    #[error("expected {expected} bits, got {got}")]
    WrongBitCount { expected: usize, got: usize },
    #[error("{component} class {class} out of range (0..{limit})")]
    ClassOutOfRange {
        component: Component,
        class: usize,
        limit: usize,
    },
    #[error("inconsistent answers: {0}")]
    InconsistentAnswers(String),
}

/// Which of the two active-object trajectory groups a value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrajectoryKind {
    Prismatic,
    Revolute,
}

impl fmt::Display for TrajectoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrajectoryKind::Prismatic => "prismatic",
            TrajectoryKind::Revolute => "revolute",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engagement {
    Rigid,
    Soft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContactDuration {
    Discontinuous,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InteractionType {
    NonContact,
    Contact {
        engagement: Engagement,
        duration: ContactDuration,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Recurrence {
    Acyclic,
    Cyclic,
}

/// Degrees of freedom of an active-object trajectory, quantized to zero,
/// one or many.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrajectoryDof {
    Zero,
    One,
    Many,
}

/// Motion of the passive object relative to the active object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PassiveMotion {
    Stationary,
    Moving,
}

/// The five independently predicted components of a motion code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Interaction,
    Recurrence,
    Prismatic,
    Revolute,
    Passive,
}

impl Component {
    pub const ALL: [Component; 5] = [
        Component::Interaction,
        Component::Recurrence,
        Component::Prismatic,
        Component::Revolute,
        Component::Passive,
    ];

    /// Class counts in component order: 5, 2, 3, 3, 2.
    pub const CLASS_COUNTS: [usize; 5] = [5, 2, 3, 3, 2];

    pub fn num_classes(self) -> usize {
        Self::CLASS_COUNTS[self.index()]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn bit_width(self) -> usize {
        match self {
            Component::Interaction => 3,
            Component::Recurrence | Component::Passive => 1,
            Component::Prismatic | Component::Revolute => 2,
        }
    }

    /// Human-readable row label used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            Component::Interaction => "Interaction",
            Component::Recurrence => "Recurrence",
            Component::Prismatic => "Prismatic trajectory",
            Component::Revolute => "Revolute trajectory",
            Component::Passive => "Passive motion",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::Interaction => "interaction",
            Component::Recurrence => "recurrence",
            Component::Prismatic => "prismatic",
            Component::Revolute => "revolute",
            Component::Passive => "passive",
        })
    }
}

/// One class index per component.
///
/// Interaction classes are ordered by bit value: 0 = non-contact (`000`),
/// 1 = `100`, 2 = `101`, 3 = `110`, 4 = `111`. Trajectory classes are
/// 0 = zero, 1 = one, 2 = many.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ComponentClasses {
    pub interaction: usize,
    pub recurrence: usize,
    pub prismatic: usize,
    pub revolute: usize,
    pub passive: usize,
}

impl ComponentClasses {
    pub fn to_array(self) -> [usize; 5] {
        [
            self.interaction,
            self.recurrence,
            self.prismatic,
            self.revolute,
            self.passive,
        ]
    }

    pub fn from_array(classes: [usize; 5]) -> Self {
        let [interaction, recurrence, prismatic, revolute, passive] = classes;
        ComponentClasses {
            interaction,
            recurrence,
            prismatic,
            revolute,
            passive,
        }
    }

    pub fn get(&self, component: Component) -> usize {
        self.to_array()[component.index()]
    }
}

/// Answers to the decision-tree questions, in the order they are asked.
///
/// `engagement` and `duration` are only meaningful for contact motions and
/// must be absent otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaxonomyAnswers {
    pub contact: bool,
    pub engagement: Option<Engagement>,
    pub duration: Option<ContactDuration>,
    pub recurrence: Recurrence,
    pub prismatic: TrajectoryDof,
    pub revolute: TrajectoryDof,
    pub passive_moving: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MotionCode {
    pub interaction: InteractionType,
    pub recurrence: Recurrence,
    pub prismatic: TrajectoryDof,
    pub revolute: TrajectoryDof,
    pub passive: PassiveMotion,
}

impl MotionCode {
    /// The 9-bit integer value, first bit most significant.
    pub fn value(&self) -> u16 {
        let interaction = match self.interaction {
            InteractionType::NonContact => 0b000,
            InteractionType::Contact {
                engagement,
                duration,
            } => {
                0b100
                    | ((engagement == Engagement::Soft) as u16) << 1
                    | (duration == ContactDuration::Continuous) as u16
            }
        };
        let dof = |d: TrajectoryDof| match d {
            TrajectoryDof::Zero => 0b00,
            TrajectoryDof::One => 0b01,
            TrajectoryDof::Many => 0b11,
        };
        interaction << 6
            | ((self.recurrence == Recurrence::Cyclic) as u16) << 5
            | dof(self.prismatic) << 3
            | dof(self.revolute) << 1
            | (self.passive == PassiveMotion::Moving) as u16
    }

    /// Decodes a 9-bit integer value, rejecting structurally invalid patterns.
    pub fn from_value(value: u16) -> Result<Self, CodeError> {
        if value >= 1 << CODE_BITS {
            return Err(CodeError::MalformedSyntax {
                text: format!("{value:#b}"),
                reason: "value exceeds 9 bits".into(),
            });
        }
        let interaction_bits = value >> 6;
        let interaction = if interaction_bits & 0b100 == 0 {
            if interaction_bits != 0 {
                return Err(CodeError::InvalidInteraction {
                    group: format!("{interaction_bits:03b}"),
                });
            }
            InteractionType::NonContact
        } else {
            InteractionType::Contact {
                engagement: if interaction_bits & 0b010 != 0 {
                    Engagement::Soft
                } else {
                    Engagement::Rigid
                },
                duration: if interaction_bits & 0b001 != 0 {
                    ContactDuration::Continuous
                } else {
                    ContactDuration::Discontinuous
                },
            }
        };
        let dof = |bits: u16, component| match bits {
            0b00 => Ok(TrajectoryDof::Zero),
            0b01 => Ok(TrajectoryDof::One),
            0b11 => Ok(TrajectoryDof::Many),
            _ => Err(CodeError::InvalidDof {
                component,
                group: format!("{bits:02b}"),
            }),
        };
        Ok(MotionCode {
            interaction,
            recurrence: if value & (1 << 5) != 0 {
                Recurrence::Cyclic
            } else {
                Recurrence::Acyclic
            },
            prismatic: dof((value >> 3) & 0b11, TrajectoryKind::Prismatic)?,
            revolute: dof((value >> 1) & 0b11, TrajectoryKind::Revolute)?,
            passive: if value & 1 != 0 {
                PassiveMotion::Moving
            } else {
                PassiveMotion::Stationary
            },
        })
    }

    /// The bit image as nine 0/1 digits, in string order.
    pub fn to_bits(&self) -> [u8; CODE_BITS] {
        let value = self.value();
        let mut bits = [0u8; CODE_BITS];
        for (i, bit) in bits.iter_mut().enumerate() {
            *bit = ((value >> (CODE_BITS - 1 - i)) & 1) as u8;
        }
        bits
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self, CodeError> {
        if bits.len() != CODE_BITS {
            return Err(CodeError::WrongBitCount {
                expected: CODE_BITS,
                got: bits.len(),
            });
        }
        let mut value = 0u16;
        for &b in bits {
            if b > 1 {
                return Err(CodeError::MalformedSyntax {
                    text: format!("{bits:?}"),
                    reason: format!("digit {b} is not binary"),
                });
            }
            value = value << 1 | b as u16;
        }
        Self::from_value(value)
    }

    /// Parses the hyphenated form `XXX-X-XX-XX-X`. Surrounding whitespace is
    /// ignored; nothing else is tolerated.
    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let trimmed = text.trim();
        let malformed = |reason: String| CodeError::MalformedSyntax {
            text: trimmed.to_string(),
            reason,
        };
        let groups: Vec<&str> = trimmed.split('-').collect();
        if groups.len() != 5 {
            return Err(malformed(format!(
                "expected 5 hyphen-separated groups, found {}",
                groups.len()
            )));
        }
        let widths = Component::ALL.map(Component::bit_width);
        let mut value = 0u16;
        for ((group, width), component) in groups.iter().zip(widths).zip(Component::ALL) {
            if group.len() != width {
                return Err(malformed(format!(
                    "{component} group {group:?} must have {width} digit(s)"
                )));
            }
            for c in group.chars() {
                let bit = match c {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(malformed(format!("{other:?} is not a binary digit"))),
                };
                value = value << 1 | bit;
            }
        }
        Self::from_value(value)
    }

    pub fn classes(&self) -> ComponentClasses {
        let dof = |d: TrajectoryDof| d as usize;
        ComponentClasses {
            interaction: match self.interaction {
                InteractionType::NonContact => 0,
                InteractionType::Contact {
                    engagement,
                    duration,
                } => 1 + 2 * engagement as usize + duration as usize,
            },
            recurrence: self.recurrence as usize,
            prismatic: dof(self.prismatic),
            revolute: dof(self.revolute),
            passive: self.passive as usize,
        }
    }

    pub fn from_classes(classes: ComponentClasses) -> Result<Self, CodeError> {
        for (component, class) in Component::ALL.into_iter().zip(classes.to_array()) {
            if class >= component.num_classes() {
                return Err(CodeError::ClassOutOfRange {
                    component,
                    class,
                    limit: component.num_classes(),
                });
            }
        }
        const DOF: [TrajectoryDof; 3] = [TrajectoryDof::Zero, TrajectoryDof::One, TrajectoryDof::Many];
        let interaction = match classes.interaction {
            0 => InteractionType::NonContact,
            c => InteractionType::Contact {
                engagement: if (c - 1) & 0b10 != 0 {
                    Engagement::Soft
                } else {
                    Engagement::Rigid
                },
                duration: if (c - 1) & 0b01 != 0 {
                    ContactDuration::Continuous
                } else {
                    ContactDuration::Discontinuous
                },
            },
        };
        Ok(MotionCode {
            interaction,
            recurrence: [Recurrence::Acyclic, Recurrence::Cyclic][classes.recurrence],
            prismatic: DOF[classes.prismatic],
            revolute: DOF[classes.revolute],
            passive: [PassiveMotion::Stationary, PassiveMotion::Moving][classes.passive],
        })
    }

    /// Walks the decision tree: contact, then engagement and duration for
    /// contact motions, then recurrence, trajectories and passive motion.
    pub fn from_answers(answers: &TaxonomyAnswers) -> Result<Self, CodeError> {
        let interaction = match (answers.contact, answers.engagement, answers.duration) {
            (false, None, None) => InteractionType::NonContact,
            (false, _, _) => {
                return Err(CodeError::InconsistentAnswers(
                    "engagement and duration apply only to contact motions".into(),
                ))
            }
            (true, Some(engagement), Some(duration)) => InteractionType::Contact {
                engagement,
                duration,
            },
            (true, _, _) => {
                return Err(CodeError::InconsistentAnswers(
                    "contact motions need both engagement and duration".into(),
                ))
            }
        };
        Ok(MotionCode {
            interaction,
            recurrence: answers.recurrence,
            prismatic: answers.prismatic,
            revolute: answers.revolute,
            passive: if answers.passive_moving {
                PassiveMotion::Moving
            } else {
                PassiveMotion::Stationary
            },
        })
    }
}

/// All 180 valid codes in ascending order of their 9-bit value.
pub fn enumerate_all() -> Vec<MotionCode> {
    (0..1u16 << CODE_BITS)
        .filter_map(|v| MotionCode::from_value(v).ok())
        .collect()
}

impl fmt::Display for MotionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.to_bits();
        write!(
            f,
            "{}{}{}-{}-{}{}-{}{}-{}",
            b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7], b[8]
        )
    }
}

impl FromStr for MotionCode {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MotionCode::parse(s)
    }
}

impl PartialOrd for MotionCode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MotionCode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.value().cmp(&other.value())
    }
}

impl Serialize for MotionCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MotionCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        MotionCode::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for InteractionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InteractionType::NonContact => f.write_str("non-contact"),
            InteractionType::Contact {
                engagement,
                duration,
            } => write!(f, "contact ({engagement}, {duration})"),
        }
    }
}

macro_rules! display_lowercase {
    ($($ty:ty => { $($variant:ident => $text:literal),+ })+) => {
        $(impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(<$ty>::$variant => $text),+ })
            }
        })+
    };
}

display_lowercase! {
    Engagement => { Rigid => "rigid", Soft => "soft" }
    ContactDuration => { Discontinuous => "discontinuous", Continuous => "continuous" }
    Recurrence => { Acyclic => "acyclic", Cyclic => "cyclic" }
    TrajectoryDof => { Zero => "zero", One => "one", Many => "many" }
    PassiveMotion => { Stationary => "stationary", Moving => "moving" }
}
