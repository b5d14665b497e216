fn main() {
    println!("qauthsim");
}
