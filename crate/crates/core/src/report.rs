//! CSV writers. Every table has a header row.

use std::io::Write;

use crate::error::Result;
use crate::eval::ConfigOutcome;
use crate::sampler::SamplePlan;
use crate::toydiff::TraceRow;
use crate::Point;

/// `step,loss,lambda_mean`
pub fn write_trace<W: Write>(out: W, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "loss", "lambda_mean"])?;
    for r in rows {
        w.serialize((r.step, r.loss, r.lambda_mean))?;
    }
    w.flush()?;
    Ok(())
}

/// `i,t,lambda,t_prime,alpha,sigma`
pub fn write_plan<W: Write>(out: W, plan: &SamplePlan) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "t", "lambda", "t_prime", "alpha", "sigma"])?;
    for r in plan.rows() {
        w.serialize((r.i, r.t, r.lambda, r.t_prime, r.alpha, r.sigma))?;
    }
    w.flush()?;
    Ok(())
}

/// `x,y`
pub fn write_points<W: Write>(out: W, points: &[Point]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y"])?;
    for p in points {
        w.serialize((p[0], p[1]))?;
    }
    w.flush()?;
    Ok(())
}

/// Long format: `config_id,schedule_json,step,sliced_wasserstein,energy_distance`.
pub fn write_compare<W: Write>(out: W, outcomes: &[ConfigOutcome]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["config_id", "schedule_json", "step", "sliced_wasserstein", "energy_distance"])?;
    for o in outcomes {
        let schedule = o.config.schedule.to_json();
        for r in &o.rows {
            w.serialize((o.config_id, &schedule, r.step, r.sliced_wasserstein, r.energy_distance))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::build_plan;
    use crate::schedule::ScheduleSpec;

    #[test]
    fn headers_and_rows() {
        let mut buf = vec![];
        write_points(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,y\n");

        let mut buf = vec![];
        write_trace(&mut buf, &[TraceRow { step: 3, loss: 0.5, lambda_mean: -1.25 }]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "step,loss,lambda_mean\n3,0.5,-1.25\n");

        let mut buf = vec![];
        write_plan(&mut buf, &build_plan(&ScheduleSpec::cosine(), 4, 1.0).unwrap()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("i,t,lambda,t_prime,alpha,sigma\n0,1.0,-15.0,1.0,"));
    }
}
