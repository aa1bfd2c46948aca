def rain():
    amounts = []
    while True:
        line = input("How much rain fell? (-999 = done): ")
        if line == "-999":
            break
        try:
            value = float(line)
        except ValueError:
            continue
        if value >= 0:
            amounts.append(value)
    total = 0
    for amount in amounts:
        total = total + amount
    if len(amounts) > 0:
        return total / len(amounts)
    return 0

if __name__ == "__main__":
    print(rain())
