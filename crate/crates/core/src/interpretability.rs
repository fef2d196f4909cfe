//! Maps classifier weights back to shapelets.
//!
//! Weights refer to standardized features. Exports carry each feature's
//! mean and std so consumers can reason in raw units.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distance::{extract_features, mean_std, DEGENERATE_STD};
use crate::error::{Error, Result};
use crate::model::{DilatedShapelet, FeatureKind, RidgeModel, ShapeletBank, TimeSeries};
use crate::stats::{mean, percentile_sorted};

/// One (shapelet, feature) weight for a class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub shapelet: usize,
    pub feature: FeatureKind,
    pub weight: f64,
    pub abs_weight: f64,
    pub length: usize,
    pub dilation: usize,
    pub normalized: bool,
    pub lambda: f64,
    pub feature_mean: f64,
    pub feature_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRanking {
    pub class: i64,
    pub entries: Vec<RankedEntry>,
}

fn check_compatible(model: &RidgeModel, bank: &ShapeletBank) -> Result<()> {
    if model.n_features() != bank.n_features() {
        return Err(Error::DimensionMismatch {
            expected: bank.n_features(),
            found: model.n_features(),
        });
    }
    Ok(())
}

/// All `3 * n_shapelets` weights of `class_id`, by descending signed weight.
/// Equal weights keep column order.
pub fn rank_shapelets(model: &RidgeModel, bank: &ShapeletBank, class_id: i64) -> Result<ClassRanking> {
    check_compatible(model, bank)?;
    let c = model
        .class_index(class_id)
        .ok_or(Error::UnknownClass(class_id))?;
    let weights = &model.weights[c];
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let entries = order
        .into_iter()
        .map(|col| {
            let (k, feature) = FeatureKind::of_column(col);
            let shp = &bank.shapelets[k];
            RankedEntry {
                shapelet: k,
                feature,
                weight: weights[col],
                abs_weight: weights[col].abs(),
                length: shp.len(),
                dilation: shp.dilation(),
                normalized: shp.normalized(),
                lambda: shp.lambda(),
                feature_mean: model.feature_means[col],
                feature_std: model.feature_stds[col],
            }
        })
        .collect();
    Ok(ClassRanking {
        class: class_id,
        entries,
    })
}

/// Where a shapelet best matches a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub start: usize,
    /// `start + j*d` for `j` in `0..l`.
    pub positions: Vec<usize>,
    /// Shapelet values aligned to `positions`.
    pub values: Vec<f64>,
    /// Values in the series' scale (`v * std + mean` of the matched window
    /// for normalized shapelets, `values` otherwise).
    pub scaled_values: Vec<f64>,
    pub min_distance: f64,
    pub window_mean: Option<f64>,
    pub window_std: Option<f64>,
}

pub fn locate_on_series(shapelet: &DilatedShapelet, series: &TimeSeries) -> Result<Placement> {
    let x = series.values();
    let t = extract_features(shapelet, x)?;
    let d = shapelet.dilation();
    let positions: Vec<usize> = (0..shapelet.len()).map(|j| t.argmin_idx + j * d).collect();
    let values = shapelet.values().to_vec();
    let (scaled_values, window_mean, window_std) = if shapelet.normalized() {
        let window: Vec<f64> = positions.iter().map(|&p| x[p]).collect();
        let (mu, sigma) = mean_std(&window);
        let sigma = if sigma < DEGENERATE_STD { 0.0 } else { sigma };
        (
            values.iter().map(|v| v * sigma + mu).collect(),
            Some(mu),
            Some(sigma),
        )
    } else {
        (values.clone(), None, None)
    };
    Ok(Placement {
        start: t.argmin_idx,
        positions,
        values,
        scaled_values,
        min_distance: t.min_dist,
        window_mean,
        window_std,
    })
}

/// Distribution of the weights sharing one value of a grouping key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightGroup {
    /// `feature`, `dilation`, `length` or `normalized`.
    pub grouping: String,
    pub key: String,
    pub count: usize,
    pub weights: Vec<f64>,
    pub abs_weights: Vec<f64>,
    pub mean: f64,
    pub mean_abs: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: i64,
    pub groups: Vec<WeightGroup>,
}

fn summarize_group(grouping: &str, key: String, weights: Vec<f64>) -> WeightGroup {
    let abs_weights: Vec<f64> = weights.iter().map(|w| w.abs()).collect();
    let mut sorted = weights.clone();
    sorted.sort_by(f64::total_cmp);
    WeightGroup {
        grouping: grouping.to_string(),
        key,
        count: weights.len(),
        mean: mean(&weights),
        mean_abs: mean(&abs_weights),
        q1: percentile_sorted(&sorted, 25.0),
        median: percentile_sorted(&sorted, 50.0),
        q3: percentile_sorted(&sorted, 75.0),
        weights,
        abs_weights,
    }
}

fn grouped<K: Ord>(
    grouping: &str,
    weights: &[f64],
    key_of: impl Fn(usize) -> K,
    label: impl Fn(&K) -> String,
) -> Vec<WeightGroup> {
    let mut map: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for (col, w) in weights.iter().enumerate() {
        map.entry(key_of(col)).or_default().push(*w);
    }
    map.into_iter()
        .map(|(k, ws)| summarize_group(grouping, label(&k), ws))
        .collect()
}

/// Per class, the weights grouped by feature kind, dilation, length and
/// normalization flag. Each grouping partitions all `3 * n_shapelets`
/// weights.
pub fn global_summary(model: &RidgeModel, bank: &ShapeletBank) -> Result<Vec<ClassSummary>> {
    check_compatible(model, bank)?;
    let shp = |col: usize| &bank.shapelets[col / 3];
    Ok(model
        .class_table
        .iter()
        .zip(&model.weights)
        .map(|(&class, weights)| {
            let mut groups = grouped("feature", weights, |c| FeatureKind::of_column(c).1, |k| {
                k.name().to_string()
            });
            groups.extend(grouped("dilation", weights, |c| shp(c).dilation(), usize::to_string));
            groups.extend(grouped("length", weights, |c| shp(c).len(), usize::to_string));
            groups.extend(grouped("normalized", weights, |c| shp(c).normalized(), bool::to_string));
            ClassSummary { class, groups }
        })
        .collect())
}

/// Placement of one top-ranked shapelet on one input series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub rank: usize,
    pub shapelet: usize,
    pub series: usize,
    pub label: i64,
    #[serde(flatten)]
    pub placement: Placement,
}

/// Everything `explain` emits for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplanationBundle {
    pub ranking: ClassRanking,
    pub summary: Vec<ClassSummary>,
    pub placements: Vec<PlacementRecord>,
}

/// Ranks the class weights, summarizes them globally, and locates the
/// `top_k` highest-ranked distinct shapelets on every series.
pub fn explain(
    model: &RidgeModel,
    bank: &ShapeletBank,
    class_id: i64,
    series: &[TimeSeries],
    labels: &[i64],
    top_k: usize,
) -> Result<ExplanationBundle> {
    let ranking = rank_shapelets(model, bank, class_id)?;
    let summary = global_summary(model, bank)?;
    let mut top = Vec::new();
    for e in &ranking.entries {
        if top.len() == top_k {
            break;
        }
        if !top.contains(&e.shapelet) {
            top.push(e.shapelet);
        }
    }
    let mut placements = Vec::with_capacity(top.len() * series.len());
    for (rank, &k) in top.iter().enumerate() {
        for (i, s) in series.iter().enumerate() {
            placements.push(PlacementRecord {
                rank: rank + 1,
                shapelet: k,
                series: i,
                label: labels.get(i).copied().unwrap_or_default(),
                placement: locate_on_series(&bank.shapelets[k], s)?,
            });
        }
    }
    Ok(ExplanationBundle {
        ranking,
        summary,
        placements,
    })
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(contents)?;
    Ok(())
}

/// Writes `ranking.{json,csv}`, `summary.{json,csv}` and
/// `placements.{json,csv}` into `dir`.
pub fn write_bundle(bundle: &ExplanationBundle, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_file(&dir.join("ranking.json"), serde_json::to_string_pretty(&bundle.ranking)?.as_bytes())?;
    let mut csv = String::from(
        "class,shapelet,feature,weight,abs_weight,length,dilation,normalized,lambda,feature_mean,feature_std\n",
    );
    for e in &bundle.ranking.entries {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            bundle.ranking.class,
            e.shapelet,
            e.feature,
            e.weight,
            e.abs_weight,
            e.length,
            e.dilation,
            e.normalized,
            e.lambda,
            e.feature_mean,
            e.feature_std
        ));
    }
    write_file(&dir.join("ranking.csv"), csv.as_bytes())?;

    write_file(&dir.join("summary.json"), serde_json::to_string_pretty(&bundle.summary)?.as_bytes())?;
    let mut csv = String::from("class,grouping,key,count,mean,mean_abs,q1,median,q3\n");
    for s in &bundle.summary {
        for g in &s.groups {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                s.class, g.grouping, g.key, g.count, g.mean, g.mean_abs, g.q1, g.median, g.q3
            ));
        }
    }
    write_file(&dir.join("summary.csv"), csv.as_bytes())?;

    write_file(
        &dir.join("placements.json"),
        serde_json::to_string_pretty(&bundle.placements)?.as_bytes(),
    )?;
    let mut csv = String::from(
        "rank,shapelet,series,label,start,min_distance,window_mean,window_std,positions,values,scaled_values\n",
    );
    for r in &bundle.placements {
        let p = &r.placement;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.rank,
            r.shapelet,
            r.series,
            r.label,
            p.start,
            p.min_distance,
            opt(p.window_mean),
            opt(p.window_std),
            join(&p.positions),
            join(&p.values),
            join(&p.scaled_values)
        ));
    }
    write_file(&dir.join("placements.csv"), csv.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GenerationConfig;

    fn bank(shapelets: Vec<DilatedShapelet>) -> ShapeletBank {
        ShapeletBank {
            config: GenerationConfig {
                n_shapelets: shapelets.len(),
                ..Default::default()
            },
            shapelets,
            seed: 0,
            train_length: 10,
        }
    }

    fn model(weights: Vec<Vec<f64>>) -> RidgeModel {
        let p = weights[0].len();
        RidgeModel {
            intercepts: vec![0.0; weights.len()],
            class_table: (0..weights.len() as i64).collect(),
            weights,
            feature_means: vec![0.0; p],
            feature_stds: vec![1.0; p],
            constant: vec![false; p],
            alpha: 1.0,
        }
    }

    fn two_shapelets() -> ShapeletBank {
        bank(vec![
            DilatedShapelet::new(vec![0.0, 1.0], 1, 0.5, false).unwrap(),
            DilatedShapelet::new(vec![-1.0, 1.0], 3, 0.2, true).unwrap(),
        ])
    }

    #[test]
    fn zero_weights_rank_by_column() {
        let r = rank_shapelets(&model(vec![vec![0.0; 6], vec![0.0; 6]]), &two_shapelets(), 1).unwrap();
        let cols: Vec<(usize, FeatureKind)> = r.entries.iter().map(|e| (e.shapelet, e.feature)).collect();
        assert_eq!(cols[0], (0, FeatureKind::Min));
        assert_eq!(cols[5], (1, FeatureKind::Occurrence));
    }

    #[test]
    fn ranking_is_descending() {
        let m = model(vec![vec![0.1, -0.3, 0.9, 0.0, 0.4, -2.0], vec![0.0; 6]]);
        let r = rank_shapelets(&m, &two_shapelets(), 0).unwrap();
        assert_eq!(r.entries[0].shapelet, 0);
        assert_eq!(r.entries[0].feature, FeatureKind::Occurrence);
        assert_eq!(r.entries[1].shapelet, 1);
        assert!(r.entries.windows(2).all(|w| w[0].weight >= w[1].weight));
        assert!(matches!(rank_shapelets(&m, &two_shapelets(), 7), Err(Error::UnknownClass(7))));
    }

    #[test]
    fn placement_positions_follow_dilation() {
        let series = TimeSeries::new(vec![0.0, 5.0, 0.0, 1.0, 9.0, 9.0, 2.0, 0.0, 0.0, 3.0]).unwrap();
        let shp = DilatedShapelet::new(vec![1.0, 2.0, 3.0], 3, 0.0, false).unwrap();
        let p = locate_on_series(&shp, &series).unwrap();
        assert_eq!(p.start, 3);
        assert_eq!(p.positions, vec![3, 6, 9]);
        assert_eq!(p.min_distance, 0.0);
        assert_eq!(p.window_mean, None);
    }

    #[test]
    fn normalized_placement_rescales() {
        let series = TimeSeries::new(vec![10.0, 14.0, 3.0, 3.0]).unwrap();
        let shp = DilatedShapelet::normalized_from(&[0.0, 1.0], 1, 0.0).unwrap();
        let p = locate_on_series(&shp, &series).unwrap();
        assert_eq!(p.start, 0);
        assert_eq!(p.scaled_values, vec![10.0, 14.0]);
        assert_eq!(p.window_mean, Some(12.0));
        assert_eq!(p.window_std, Some(2.0));
    }

    #[test]
    fn summary_partitions_weights() {
        let m = model(vec![vec![0.1, -0.3, 0.9, 0.0, 0.4, -2.0], vec![1.0; 6]]);
        let summary = global_summary(&m, &two_shapelets()).unwrap();
        assert_eq!(summary.len(), 2);
        for grouping in ["feature", "dilation", "length", "normalized"] {
            let total: usize = summary[0]
                .groups
                .iter()
                .filter(|g| g.grouping == grouping)
                .map(|g| g.count)
                .sum();
            assert_eq!(total, 6, "{grouping}");
        }
        let lengths: Vec<&WeightGroup> = summary[0].groups.iter().filter(|g| g.grouping == "length").collect();
        assert_eq!(lengths.len(), 1);
    }
}
