use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Informational; never fails a run unless promoted by the caller.
    Report,
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckItem {
    pub id: String,
    pub status: Status,
    pub detail: String,
}

impl CheckItem {
    pub fn check(id: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        CheckItem {
            id: id.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    pub fn report(id: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckItem {
            id: id.into(),
            status: Status::Report,
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

pub fn all_passed(items: &[CheckItem]) -> bool {
    items.iter().all(CheckItem::passed)
}
