//! Data-parallel helpers. With the default `parallel` feature the work is
//! spread over a rayon pool; without it the same entry points run
//! sequentially. The `*_seq` variants always run sequentially and exist so
//! benchmarks can compare both paths in one build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::rules::{ClassifyError, Detection, RuleConfig};
use crate::skeleton::SkeletonFrame;

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order matches input order either way.
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sequential twin of [`map_collect`].
pub fn map_collect_seq<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Classifies a batch of independent clips (each a full frame sequence at
/// `fps`), one window per clip.
pub fn classify_clips(
    clips: &[Vec<SkeletonFrame>],
    fps: f64,
    config: &RuleConfig,
) -> Vec<Result<Detection, ClassifyError>> {
    map_collect(clips, |frames| {
        crate::rules::classify_clip(frames, fps, config)
    })
}

/// Sequential twin of [`classify_clips`], for baseline comparison.
pub fn classify_clips_seq(
    clips: &[Vec<SkeletonFrame>],
    fps: f64,
    config: &RuleConfig,
) -> Vec<Result<Detection, ClassifyError>> {
    map_collect_seq(clips, |frames| {
        crate::rules::classify_clip(frames, fps, config)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::PoseCategory;
    use crate::synth::{generate, SynthScript};

    #[test]
    fn parallel_and_sequential_agree() {
        let clips: Vec<Vec<SkeletonFrame>> = [
            PoseCategory::FoldedArm,
            PoseCategory::Walking,
            PoseCategory::None,
            PoseCategory::ShoulderShaking,
        ]
        .into_iter()
        .map(|c| generate(&SynthScript::standard(c, 1)))
        .collect();
        let config = RuleConfig::default();
        let par = classify_clips(&clips, 30.0, &config);
        let seq = classify_clips_seq(&clips, 30.0, &config);
        assert_eq!(par, seq);
        assert_eq!(
            par[0].as_ref().unwrap().category,
            PoseCategory::FoldedArm
        );
    }
}
