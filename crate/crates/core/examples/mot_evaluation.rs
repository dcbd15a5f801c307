//! CLEAR MOT, IDF1 and identity-switch counting on hand-made trajectories.
//!
//!     cargo run --example mot_evaluation

use rinktrack::core::{parse_detection_str, tracks_from_rows};
use rinktrack::metrics::{
    count_idsw, idf1, match_frames, mota, switch_count, evaluate_video, MetricsParams,
};

const GT: &str = "\
0,1,10,10,20,40,1
1,1,12,10,20,40,1
2,1,14,10,20,40,1
3,1,16,10,20,40,1
0,2,100,10,20,40,1
1,2,102,10,20,40,1
2,2,104,10,20,40,1
3,2,106,10,20,40,1
";

// Track 7 follows object 1 and then jumps to object 2 in frame 3; frame 2
// is missed entirely and a ghost box appears in frame 1.
const PRED: &str = "\
0,7,10,10,20,40,0.9
1,7,12,10,20,40,0.9
3,7,106,10,20,40,0.9
0,8,100,10,20,40,0.9
1,8,102,10,20,40,0.9
3,8,16,10,20,40,0.9
1,9,300,300,20,40,0.6
";

fn main() -> rinktrack::Result<()> {
    let gt = tracks_from_rows(&parse_detection_str(GT, "gt")?)?;
    let pred = tracks_from_rows(&parse_detection_str(PRED, "pred")?)?;

    let matching = match_frames(&gt, &pred, 0.5);
    let (fp, fn_, idsw) = (matching.false_positives(), matching.false_negatives(), count_idsw(&matching));
    println!("FP {fp}  FN {fn_}  IDSW {idsw}  GT {}", matching.gt_total());
    println!("MOTA {:.4}", mota(fp, fn_, idsw, matching.gt_total())?);
    let id = idf1(&gt, &pred, 0.5);
    println!("IDF1 {:.4} (IDTP {} IDFP {} IDFN {})", id.idf1, id.idtp, id.idfp, id.idfn);

    let report = evaluate_video("toy", &gt, &pred, &MetricsParams::default())?;
    println!("report: MOTA {:.4} IDF1 {:.4} IDSW {} pan-IDSW {}", report.mota, report.idf1, report.idsw, report.pan_idsw);

    println!("\nswitches in matched-id sequences:");
    for seq in [
        vec![Some(1), Some(1), Some(2), Some(2)],
        vec![Some(1), None, Some(1)],
        vec![Some(1), None, Some(2), Some(1)],
    ] {
        println!("  {seq:?} -> {}", switch_count(&seq));
    }
    Ok(())
}
