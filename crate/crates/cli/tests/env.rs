// Alone in its own binary: it sets a process-wide variable.

use bubbleforge_cli::run;

fn code(args: &[&str]) -> i32 {
    let argv = std::iter::once("bubbleforge").chain(args.iter().copied());
    run(argv, &mut Vec::new(), &mut Vec::new())
}

#[test]
fn threads_default_from_environment() {
    std::env::set_var("BUBBLEFORGE_THREADS", "0");
    assert_eq!(code(&["verify", "lemma-37"]), 2);
    // The flag wins over the variable.
    assert_eq!(code(&["verify", "lemma-37", "--threads", "2"]), 0);
    std::env::set_var("BUBBLEFORGE_THREADS", "2");
    assert_eq!(code(&["verify", "lemma-37"]), 0);
    std::env::remove_var("BUBBLEFORGE_THREADS");
}
