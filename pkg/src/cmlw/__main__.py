from cmlw.cli import main

main()
