//! The bare event kernel: scheduling, cancellation and a counted resource
//! with a priority queue.
//!
//! ```text
//! cargo run --example event_kernel
//! ```

use wardsim::engine::{Acquire, CountedResource, SimTime, Simulation};

#[derive(Debug)]
enum Event {
    Request { who: &'static str, priority: i32 },
    Release,
    Alarm,
}

fn main() {
    let mut sim = Simulation::new();
    let at = |t: f64| SimTime::new(t).expect("valid time");
    sim.schedule(at(1.0), Event::Request { who: "routine", priority: 1 }).unwrap();
    sim.schedule(at(2.0), Event::Request { who: "second routine", priority: 1 }).unwrap();
    sim.schedule(at(3.0), Event::Request { who: "urgent", priority: 0 }).unwrap();
    sim.schedule(at(5.0), Event::Release).unwrap();
    let alarm = sim.schedule(at(4.0), Event::Alarm).unwrap();
    sim.cancel(alarm);

    let mut bed = CountedResource::new(1);
    let mut handler = |sim: &mut Simulation<Event>, event: Event| {
        let now = sim.now();
        match event {
            Event::Request { who, priority } => match bed.request(who, priority, now) {
                Acquire::Granted => println!("t={:.1} {who} gets the bed", now.value()),
                Acquire::Queued => println!("t={:.1} {who} waits", now.value()),
            },
            Event::Release => {
                if let Some(g) = bed.release(now).expect("bed was held") {
                    println!(
                        "t={:.1} bed passes to {} after waiting {:.1}",
                        now.value(),
                        g.token,
                        g.wait()
                    );
                    sim.schedule_in(2.0, Event::Release).unwrap();
                }
            }
            Event::Alarm => println!("cancelled events never fire"),
        }
    };
    let fired = sim.run_until(at(20.0), &mut handler);
    println!("{fired} events fired, clock at {:.1}", sim.now().value());
}
