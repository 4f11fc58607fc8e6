from selframe.cli import main

main()
