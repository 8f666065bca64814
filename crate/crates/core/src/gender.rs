//! Gender preference in time (GPT) and happiness difference between
//! genders (HDG), per decade.
//!
//! GPT = NOF − NOM, where NOF and NOM are the female and male shares of a
//! decade's faces. HDG = AHF − AHM, the difference of mean female and mean
//! male happiness. Both lie in `[-1, 1]`.

use serde::Serialize;

use crate::emotion::{FaceAnnotation, Gender};
use crate::temporal::DecadeGroups;

pub const DEFAULT_MIN_FACES: usize = 60;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GenderError {
    #[error("no gendered faces")]
    NoGenderedFaces,
    #[error("gender absent in decade")]
    GenderAbsent,
    #[error("no decade has at least {0} faces")]
    NoDecadeSurvives(usize),
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    female: usize,
    male: usize,
    female_happiness: f64,
    male_happiness: f64,
}

impl Tally {
    fn of(faces: &[FaceAnnotation]) -> Tally {
        let mut t = Tally::default();
        for f in faces {
            match f.gender {
                Gender::Female => {
                    t.female += 1;
                    t.female_happiness += f.happiness();
                }
                Gender::Male => {
                    t.male += 1;
                    t.male_happiness += f.happiness();
                }
            }
        }
        t
    }

    fn shares(&self) -> Option<(f64, f64)> {
        let total = self.female + self.male;
        (total > 0).then(|| {
            (
                self.female as f64 / total as f64,
                self.male as f64 / total as f64,
            )
        })
    }

    fn means(&self) -> (Option<f64>, Option<f64>) {
        let mean = |sum: f64, n: usize| (n > 0).then(|| sum / n as f64);
        (
            mean(self.female_happiness, self.female),
            mean(self.male_happiness, self.male),
        )
    }
}

pub fn gpt(faces: &[FaceAnnotation]) -> Result<f64, GenderError> {
    let (nof, nom) = Tally::of(faces)
        .shares()
        .ok_or(GenderError::NoGenderedFaces)?;
    Ok(nof - nom)
}

pub fn hdg(faces: &[FaceAnnotation]) -> Result<f64, GenderError> {
    match Tally::of(faces).means() {
        (Some(ahf), Some(ahm)) => Ok(ahf - ahm),
        _ => Err(GenderError::GenderAbsent),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenderDecadeStats {
    pub start_year: i32,
    pub n_female_faces: usize,
    pub n_male_faces: usize,
    pub nof: f64,
    pub nom: f64,
    pub ahf: Option<f64>,
    pub ahm: Option<f64>,
    pub gpt: f64,
    /// `None` when one gender is missing from the decade.
    pub hdg: Option<f64>,
}

pub fn decade_stats(
    start_year: i32,
    faces: &[FaceAnnotation],
) -> Result<GenderDecadeStats, GenderError> {
    let tally = Tally::of(faces);
    let (nof, nom) = tally.shares().ok_or(GenderError::NoGenderedFaces)?;
    let (ahf, ahm) = tally.means();
    Ok(GenderDecadeStats {
        start_year,
        n_female_faces: tally.female,
        n_male_faces: tally.male,
        nof,
        nom,
        ahf,
        ahm,
        gpt: nof - nom,
        hdg: ahf.zip(ahm).map(|(f, m)| f - m),
    })
}

/// Stats for every decade holding at least `min_faces` faces.
pub fn gender_series(
    groups: &DecadeGroups,
    min_faces: usize,
) -> Result<Vec<GenderDecadeStats>, GenderError> {
    let series: Vec<_> = groups
        .faces
        .iter()
        .filter(|(_, faces)| !faces.is_empty() && faces.len() >= min_faces)
        .map(|(start, faces)| decade_stats(*start, faces))
        .collect::<Result<_, _>>()?;
    if series.is_empty() {
        return Err(GenderError::NoDecadeSurvives(min_faces));
    }
    Ok(series)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GenderSummary {
    pub decades: usize,
    pub female_happier: usize,
    pub male_happier: usize,
    pub equal_happiness: usize,
    pub female_more_frequent: usize,
    pub male_more_frequent: usize,
}

pub fn summarize(series: &[GenderDecadeStats]) -> GenderSummary {
    let mut s = GenderSummary {
        decades: series.len(),
        ..Default::default()
    };
    for d in series {
        match d.hdg {
            Some(h) if h > 0.0 => s.female_happier += 1,
            Some(h) if h < 0.0 => s.male_happier += 1,
            Some(_) => s.equal_happiness += 1,
            None => {}
        }
        if d.gpt > 0.0 {
            s.female_more_frequent += 1;
        } else if d.gpt < 0.0 {
            s.male_more_frequent += 1;
        }
    }
    s
}
