use std::fmt;

use serde::Serialize;

/// The five identity categories used to group the Jigsaw identity columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityCategory {
    Gender,
    Sex,
    Religion,
    Race,
    Disability,
}

impl fmt::Display for IdentityCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IdentityCategory::Gender => "gender",
            IdentityCategory::Sex => "sex",
            IdentityCategory::Religion => "religion",
            IdentityCategory::Race => "race",
            IdentityCategory::Disability => "disability",
        };
        f.write_str(s)
    }
}

/// All 24 identity columns of the Jigsaw unintended-bias corpus, grouped by category.
pub const JIGSAW_IDENTITIES: [(&str, IdentityCategory); 24] = [
    ("male", IdentityCategory::Gender),
    ("female", IdentityCategory::Gender),
    ("transgender", IdentityCategory::Gender),
    ("other_gender", IdentityCategory::Gender),
    ("heterosexual", IdentityCategory::Sex),
    ("homosexual_gay_or_lesbian", IdentityCategory::Sex),
    ("bisexual", IdentityCategory::Sex),
    ("other_sexual_orientation", IdentityCategory::Sex),
    ("christian", IdentityCategory::Religion),
    ("jewish", IdentityCategory::Religion),
    ("muslim", IdentityCategory::Religion),
    ("hindu", IdentityCategory::Religion),
    ("buddhist", IdentityCategory::Religion),
    ("atheist", IdentityCategory::Religion),
    ("other_religion", IdentityCategory::Religion),
    ("black", IdentityCategory::Race),
    ("white", IdentityCategory::Race),
    ("asian", IdentityCategory::Race),
    ("latino", IdentityCategory::Race),
    ("other_race_or_ethnicity", IdentityCategory::Race),
    ("physical_disability", IdentityCategory::Disability),
    (
        "intellectual_or_learning_disability",
        IdentityCategory::Disability,
    ),
    (
        "psychiatric_or_mental_illness",
        IdentityCategory::Disability,
    ),
    ("other_disability", IdentityCategory::Disability),
];

/// The nine subgroups reported in the per-identity bias tables.
pub const DEFAULT_SUBGROUPS: [&str; 9] = [
    "male",
    "female",
    "christian",
    "muslim",
    "white",
    "jewish",
    "black",
    "homosexual_gay_or_lesbian",
    "psychiatric_or_mental_illness",
];

pub fn identity_category(name: &str) -> Option<IdentityCategory> {
    JIGSAW_IDENTITIES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, c)| *c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subtype {
    SevereToxicity,
    Obscene,
    IdentityAttack,
    Insult,
    Threat,
    SexuallyExplicit,
}

impl Subtype {
    pub const ALL: [Subtype; 6] = [
        Subtype::SevereToxicity,
        Subtype::Obscene,
        Subtype::IdentityAttack,
        Subtype::Insult,
        Subtype::Threat,
        Subtype::SexuallyExplicit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subtype::SevereToxicity => "severe_toxicity",
            Subtype::Obscene => "obscene",
            Subtype::IdentityAttack => "identity_attack",
            Subtype::Insult => "insult",
            Subtype::Threat => "threat",
            Subtype::SexuallyExplicit => "sexually_explicit",
        }
    }

    /// Column header used by the Jigsaw CSV release.
    pub fn jigsaw_column(self) -> &'static str {
        match self {
            Subtype::SexuallyExplicit => "sexual_explicit",
            other => other.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reaction {
    Funny,
    Wow,
    Sad,
    Likes,
    Disagree,
}

impl Reaction {
    pub const ALL: [Reaction; 5] = [
        Reaction::Funny,
        Reaction::Wow,
        Reaction::Sad,
        Reaction::Likes,
        Reaction::Disagree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Reaction::Funny => "funny",
            Reaction::Wow => "wow",
            Reaction::Sad => "sad",
            Reaction::Likes => "likes",
            Reaction::Disagree => "disagree",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegistryEntry {
    pub name: String,
    pub category: IdentityCategory,
}

/// Ordered list of identity columns known to a corpus.
///
/// Order always follows [`JIGSAW_IDENTITIES`], which keeps entries grouped by category.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct IdentityRegistry {
    entries: Vec<RegistryEntry>,
}

impl IdentityRegistry {
    /// Registry holding all 24 Jigsaw identities.
    pub fn jigsaw() -> Self {
        Self::from_names(JIGSAW_IDENTITIES.iter().map(|(n, _)| *n))
            .expect("jigsaw identities are known")
    }

    /// Builds a registry from identity names, reordering them canonically.
    /// Returns the first unknown name on failure.
    pub fn from_names<'a, I>(names: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let wanted: Vec<&str> = names.into_iter().collect();
        if let Some(bad) = wanted.iter().find(|n| identity_category(n).is_none()) {
            return Err((*bad).to_string());
        }
        let entries = JIGSAW_IDENTITIES
            .iter()
            .filter(|(n, _)| wanted.contains(n))
            .map(|(n, c)| RegistryEntry {
                name: (*n).to_string(),
                category: *c,
            })
            .collect();
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|e| e.name == name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn by_category(&self, category: IdentityCategory) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(move |e| e.category == category)
            .map(|e| e.name.as_str())
    }
}

/// Maps logical corpus fields to CSV header names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSchema {
    pub id: String,
    pub text: String,
    pub target: String,
    pub subtypes: Vec<(Subtype, String)>,
    pub identities: Vec<(String, String)>,
    pub reactions: Vec<(Reaction, String)>,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        Self::jigsaw()
    }
}

impl ColumnSchema {
    pub fn jigsaw() -> Self {
        Self {
            id: "id".into(),
            text: "comment_text".into(),
            target: "target".into(),
            subtypes: Subtype::ALL
                .iter()
                .map(|s| (*s, s.jigsaw_column().to_string()))
                .collect(),
            identities: JIGSAW_IDENTITIES
                .iter()
                .map(|(n, _)| ((*n).to_string(), (*n).to_string()))
                .collect(),
            reactions: Reaction::ALL
                .iter()
                .map(|r| (*r, r.name().to_string()))
                .collect(),
        }
    }

    /// Renames the header used for a logical field.
    ///
    /// `field` is one of `id`, `comment_text`, `target`, a subtype name, an
    /// identity name or a reaction name. Returns `false` if the field is unknown.
    pub fn set_column(&mut self, field: &str, header: &str) -> bool {
        let header = header.to_string();
        match field {
            "id" => self.id = header,
            "comment_text" | "text" => self.text = header,
            "target" => self.target = header,
            _ => {
                if let Some(slot) = self
                    .subtypes
                    .iter_mut()
                    .find(|(s, _)| s.name() == field || s.jigsaw_column() == field)
                {
                    slot.1 = header;
                } else if let Some(slot) = self.identities.iter_mut().find(|(n, _)| n == field) {
                    slot.1 = header;
                } else if let Some(slot) =
                    self.reactions.iter_mut().find(|(r, _)| r.name() == field)
                {
                    slot.1 = header;
                } else {
                    return false;
                }
            }
        }
        true
    }
}
