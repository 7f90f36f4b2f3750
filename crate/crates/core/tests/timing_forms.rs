// A timing arc a -> b with delay d behaves like a place fed by a whose
// tokens inhibit b while younger than d.

use dram_petri::{ArcKind, NetBuilder, PlaceKind, TimingState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn register_and_token_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in 1..=12u64 {
        let mut rb = NetBuilder::new();
        let (ra, rb_t) = (
            rb.add_custom_transition("a", None).unwrap(),
            rb.add_custom_transition("b", None).unwrap(),
        );
        rb.add_arc(ra, rb_t, ArcKind::Timing { delay: d }).unwrap();
        let reg = rb.freeze();

        let mut tb = NetBuilder::new();
        let (ta, tb_t) = (
            tb.add_custom_transition("a", None).unwrap(),
            tb.add_custom_transition("b", None).unwrap(),
        );
        let aged = tb
            .add_place(PlaceKind::Aux("since_a".into()), None, 0)
            .unwrap();
        tb.add_arc(ta, aged, ArcKind::normal()).unwrap();
        tb.add_arc(
            aged,
            tb_t,
            ArcKind::TimedInhibitor {
                from: 0,
                to: d - 1,
                threshold: 1,
            },
        )
        .unwrap();
        let tok = tb.freeze();

        for _ in 0..50 {
            let mut reg_state = TimingState::new(&reg, &[]);
            let mut tok_state = TimingState::new(&tok, &[]);
            let mut now = 0;
            for _ in 0..40 {
                now += rng.gen_range(0..=d + 2);
                let pick_a = rng.gen_bool(0.5);
                let (r, t) = if pick_a { (ra, ta) } else { (rb_t, tb_t) };
                let r_ok = reg_state.timing_enabled(&reg, r, now);
                let t_ok = tok_state.timing_enabled(&tok, t, now);
                assert_eq!(r_ok, t_ok, "d={d} now={now} a={pick_a}");
                assert_eq!(
                    reg_state.earliest_fire_time(&reg, r, now),
                    tok_state.earliest_fire_time(&tok, t, now),
                    "d={d} now={now}"
                );
                if r_ok {
                    reg_state.record_firing(&reg, r, now).unwrap();
                    tok_state.record_firing(&tok, t, now).unwrap();
                }
            }
        }
    }
}
