//! Runs one acceptance criterion by number, or all of them.

fn main() {
    let arg = std::env::args().nth(1);
    match arg.as_deref().map(str::parse::<u8>) {
        Some(Ok(id)) => match opencore::acceptance::run(id, 2024) {
            Some(r) => println!("{r}"),
            None => eprintln!("criteria are numbered 1 to 10"),
        },
        _ => opencore::acceptance::run_all(2024).iter().for_each(|r| println!("{r}")),
    }
}
