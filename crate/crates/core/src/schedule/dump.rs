use serde::{Deserialize, Serialize};

use super::Schedule;
use crate::error::{Error, Result};
use crate::model::{DownlinkMission, ImageData, Instance};
use crate::objectives::ObjectiveVector;

/// On-disk form of a schedule. It carries the image-data set it was built
/// from so a validator can check it against the instance alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDump {
    pub missions: Vec<DownlinkMission>,
    pub scheduled_oids: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objectives: Option<ObjectiveVector>,
    pub image_data: Vec<ImageData>,
}

impl ScheduleDump {
    pub fn new(s: &Schedule, inst: &Instance, nt: &[ImageData]) -> Self {
        ScheduleDump {
            missions: s.missions.clone(),
            scheduled_oids: inst
                .oids
                .iter()
                .zip(&s.scheduled)
                .filter(|(_, &x)| x)
                .map(|(t, _)| t.id)
                .collect(),
            objectives: s.objectives,
            image_data: nt.to_vec(),
        }
    }

    /// Rebuilds the schedule against `inst`, returning it with its image data.
    pub fn into_schedule(self, inst: &Instance) -> Result<(Schedule, Vec<ImageData>)> {
        let mut scheduled = vec![false; inst.oids.len()];
        for id in &self.scheduled_oids {
            let i = inst
                .oids
                .iter()
                .position(|t| t.id == *id)
                .ok_or_else(|| Error::parse("scheduled_oids", format!("unknown OID {id}")))?;
            scheduled[i] = true;
        }
        let s = Schedule {
            missions: self.missions,
            scheduled,
            objectives: self.objectives,
        };
        Ok((s, self.image_data))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::parse("schedule", e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("schedule", e.to_string()))
    }
}
