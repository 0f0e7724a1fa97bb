//! Question-by-question walk down the taxonomy decision tree.

use std::fmt;

use motion_code::{
    ContactDuration, Engagement, MotionCode, Recurrence, TaxonomyAnswers, TrajectoryDof,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Question {
    Contact,
    Engagement,
    Duration,
    Recurrence,
    Prismatic,
    Revolute,
    PassiveMoving,
}

impl Question {
    pub fn prompt(self) -> &'static str {
        match self {
            Question::Contact => "Does the active object touch the passive object? [y/n]",
            Question::Engagement => "Engagement between the objects? [rigid/soft]",
            Question::Duration => "Contact duration? [discontinuous/continuous]",
            Question::Recurrence => "Is the trajectory repeated? [acyclic/cyclic]",
            Question::Prismatic => "Prismatic (translational) DoF of the active object? [0/1/many]",
            Question::Revolute => "Revolute (rotational) DoF of the active object? [0/1/many]",
            Question::PassiveMoving => {
                "Does the passive object move relative to the active object? [y/n]"
            }
        }
    }

    fn expected(self) -> &'static str {
        match self {
            Question::Contact | Question::PassiveMoving => "y or n",
            Question::Engagement => "rigid or soft",
            Question::Duration => "discontinuous or continuous",
            Question::Recurrence => "acyclic or cyclic",
            Question::Prismatic | Question::Revolute => "0, 1 or many",
        }
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Question::Contact => "contact",
            Question::Engagement => "engagement",
            Question::Duration => "duration",
            Question::Recurrence => "recurrence",
            Question::Prismatic => "prismatic",
            Question::Revolute => "revolute",
            Question::PassiveMoving => "passive motion",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidAnswer {
    pub question: Question,
    pub answer: String,
}

impl fmt::Display for InvalidAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid answer {:?} to the {} question (expected {})",
            self.answer,
            self.question,
            self.question.expected()
        )
    }
}

impl std::error::Error for InvalidAnswer {}

#[derive(Debug, Clone, Default)]
pub struct Wizard {
    contact: Option<bool>,
    engagement: Option<Engagement>,
    duration: Option<ContactDuration>,
    recurrence: Option<Recurrence>,
    prismatic: Option<TrajectoryDof>,
    revolute: Option<TrajectoryDof>,
    passive_moving: Option<bool>,
}

fn yes_no(text: &str) -> Option<bool> {
    match text {
        "y" | "yes" => Some(true),
        "n" | "no" => Some(false),
        _ => None,
    }
}

fn dof(text: &str) -> Option<TrajectoryDof> {
    match text {
        "0" | "zero" | "none" => Some(TrajectoryDof::Zero),
        "1" | "one" => Some(TrajectoryDof::One),
        "many" | "m" => Some(TrajectoryDof::Many),
        _ => None,
    }
}

impl Wizard {
    pub fn new() -> Self {
        Self::default()
    }

    /// The next unanswered question, or `None` once the code is determined.
    /// Engagement and duration are only asked after a contact answer.
    pub fn next_question(&self) -> Option<Question> {
        match self.contact {
            None => return Some(Question::Contact),
            Some(true) if self.engagement.is_none() => return Some(Question::Engagement),
            Some(true) if self.duration.is_none() => return Some(Question::Duration),
            _ => {}
        }
        if self.recurrence.is_none() {
            Some(Question::Recurrence)
        } else if self.prismatic.is_none() {
            Some(Question::Prismatic)
        } else if self.revolute.is_none() {
            Some(Question::Revolute)
        } else if self.passive_moving.is_none() {
            Some(Question::PassiveMoving)
        } else {
            None
        }
    }

    pub fn is_started(&self) -> bool {
        self.contact.is_some()
    }

    /// Records an answer to the current question. Matching is
    /// case-insensitive and ignores surrounding whitespace.
    pub fn answer(&mut self, text: &str) -> Result<(), InvalidAnswer> {
        let Some(question) = self.next_question() else {
            return Ok(());
        };
        let normalized = text.trim().to_lowercase();
        let t = normalized.as_str();
        let accepted = match question {
            Question::Contact => yes_no(t).map(|v| self.contact = Some(v)),
            Question::Engagement => match t {
                "rigid" => Some(Engagement::Rigid),
                "soft" => Some(Engagement::Soft),
                _ => None,
            }
            .map(|v| self.engagement = Some(v)),
            Question::Duration => match t {
                "discontinuous" => Some(ContactDuration::Discontinuous),
                "continuous" => Some(ContactDuration::Continuous),
                _ => None,
            }
            .map(|v| self.duration = Some(v)),
            Question::Recurrence => match t {
                "acyclic" => Some(Recurrence::Acyclic),
                "cyclic" => Some(Recurrence::Cyclic),
                _ => None,
            }
            .map(|v| self.recurrence = Some(v)),
            Question::Prismatic => dof(t).map(|v| self.prismatic = Some(v)),
            Question::Revolute => dof(t).map(|v| self.revolute = Some(v)),
            Question::PassiveMoving => yes_no(t).map(|v| self.passive_moving = Some(v)),
        };
        accepted.ok_or_else(|| InvalidAnswer {
            question,
            answer: text.trim().to_string(),
        })
    }

    pub fn answers(&self) -> Option<TaxonomyAnswers> {
        if self.next_question().is_some() {
            return None;
        }
        Some(TaxonomyAnswers {
            contact: self.contact?,
            engagement: self.engagement,
            duration: self.duration,
            recurrence: self.recurrence?,
            prismatic: self.prismatic?,
            revolute: self.revolute?,
            passive_moving: self.passive_moving?,
        })
    }

    pub fn code(&self) -> Option<MotionCode> {
        self.answers()
            .map(|a| MotionCode::from_answers(&a).expect("wizard only builds consistent answers"))
    }
}

/// Runs scripted answers through the wizard, one answer per line. Blank
/// lines and `#` comments are skipped; several codes may follow each other.
pub fn run_script(lines: &[String]) -> Result<Vec<MotionCode>, ScriptError> {
    let mut codes = Vec::new();
    let mut wizard = Wizard::new();
    for (i, line) in lines.iter().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        wizard.answer(trimmed).map_err(|source| ScriptError::Invalid {
            line: i + 1,
            source,
        })?;
        if let Some(code) = wizard.code() {
            codes.push(code);
            wizard = Wizard::new();
        }
    }
    if let Some(question) = wizard.is_started().then(|| wizard.next_question()).flatten() {
        return Err(ScriptError::Incomplete(question));
    }
    Ok(codes)
}

#[derive(Debug)]
pub enum ScriptError {
    Invalid { line: usize, source: InvalidAnswer },
    Incomplete(Question),
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScriptError::Invalid { line, source } => write!(f, "line {line}: {source}"),
            ScriptError::Incomplete(q) => {
                write!(f, "script ended before the {q} question was answered")
            }
        }
    }
}

impl std::error::Error for ScriptError {}

#[cfg(test)]
mod tests {
    use super::*;

    fn script(answers: &[&str]) -> Result<Vec<String>, ScriptError> {
        let lines: Vec<String> = answers.iter().map(|s| s.to_string()).collect();
        run_script(&lines).map(|codes| codes.iter().map(|c| c.to_string()).collect())
    }

    #[test]
    fn flip_sequence() {
        assert_eq!(
            script(&["y", "rigid", "continuous", "acyclic", "1", "1", "n"]).unwrap(),
            vec!["101-0-01-01-0"]
        );
    }

    #[test]
    fn pour_skips_contact_details() {
        let mut w = Wizard::new();
        w.answer("n").unwrap();
        assert_eq!(w.next_question(), Some(Question::Recurrence));
        assert_eq!(
            script(&["n", "acyclic", "0", "1", "n"]).unwrap(),
            vec!["000-0-00-01-0"]
        );
    }

    #[test]
    fn batch_and_comments() {
        assert_eq!(
            script(&["# pour", "N", "", "Acyclic", "0", "1", "no", "yes", "soft", "continuous", "cyclic", "many", "0", "n"])
                .unwrap(),
            vec!["000-0-00-01-0", "111-1-11-00-0"]
        );
        assert!(script(&[]).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_answers() {
        match script(&["maybe"]) {
            Err(ScriptError::Invalid { line: 1, source }) => {
                assert_eq!(source.question, Question::Contact)
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            script(&["y", "rigid", "continuous", "acyclic", "2"]),
            Err(ScriptError::Invalid { line: 5, .. })
        ));
    }

    #[test]
    fn incomplete_script() {
        assert!(matches!(
            script(&["y", "rigid"]),
            Err(ScriptError::Incomplete(Question::Duration))
        ));
    }

    #[test]
    fn invalid_answer_keeps_state() {
        let mut w = Wizard::new();
        w.answer("y").unwrap();
        assert!(w.answer("squishy").is_err());
        assert_eq!(w.next_question(), Some(Question::Engagement));
        w.answer("soft").unwrap();
        assert_eq!(w.next_question(), Some(Question::Duration));
    }
}
